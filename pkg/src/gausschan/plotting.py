"""Figure rendering for the ``(tau, y)`` region curves."""

from __future__ import annotations

from matplotlib.figure import Figure


def plot_region(rows, path, n_bar=None, s=None, dpi=150):
    """Draw the physical, entanglement-breaking and threshold curves to ``path``.

    Args:
        rows: output of :func:`gausschan.capacity.region_rows`.
        path: image file name; the format follows the extension.
        n_bar, s: only used for the legend of the threshold curve.
    """
    tau = [r[0] for r in rows]
    y_min = [r[1] for r in rows]
    y_eb = [r[2] for r in rows]
    thr = [(r[0], r[3]) for r in rows if r[3] is not None]

    fig = Figure(figsize=(5.0, 4.0))
    ax = fig.add_subplot()
    top = max(max(y_eb), max((t[1] for t in thr), default=0.0)) * 1.1
    ax.fill_between(tau, 0.0, y_min, color="0.85", label="unphysical")
    ax.plot(tau, y_min, color="k", lw=1.5, label=r"$y = |\tau-1|/2$")
    ax.plot(tau, y_eb, color="tab:blue", lw=1.5, label=r"$y = (|\tau|+1)/2$")
    if thr:
        label = r"$y_{thr}$"
        if n_bar is not None and s is not None:
            label += rf" ($\bar N$={n_bar:g}, s={s:g})"
        ax.plot([t[0] for t in thr], [t[1] for t in thr], "--", color="tab:red", lw=1.5, label=label)
    ax.set_xlim(min(tau), max(tau))
    ax.set_ylim(0.0, top)
    ax.set_xlabel(r"$\tau$")
    ax.set_ylabel(r"$y$")
    ax.legend(loc="upper left", fontsize=8, frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    return path
