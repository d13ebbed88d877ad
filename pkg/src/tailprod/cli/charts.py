"""Static SVG convergence charts with byte-deterministic output.

The charts are assembled from plain strings (no plotting library) so that
identical reports produce identical bytes: log-x ratio curves with a
confidence band and a dashed asymptote line.
"""

import math
import os
import tempfile

from ..estimators import CdDiagnostic, TailRatioReport
from ..ruin import RuinResult

__all__ = ["render_chart", "render_tail_ratio", "render_cd_diagnostic", "render_ruin"]

W, H = 720, 440
ML, MR, MT, MB = 78, 30, 46, 56
PW, PH = W - ML - MR, H - MT - MB

STYLE = (
    "text{font-family:monospace;font-size:12px;fill:#222}"
    ".title{font-size:14px}"
    ".axis{stroke:#222;stroke-width:1;fill:none}"
    ".grid{stroke:#ddd;stroke-width:1;fill:none}"
    ".curve{stroke:#1f5fa8;stroke-width:1.8;fill:none}"
    ".band{fill:#1f5fa8;fill-opacity:0.15;stroke:none}"
    ".asym{stroke:#b03030;stroke-width:1.4;stroke-dasharray:6 4;fill:none}"
    ".pt{fill:#1f5fa8;stroke:none}"
)


def _f(v: float) -> str:
    return format(float(v), ".2f")


def _label(v: float) -> str:
    return format(float(v), ".4g")


def _log_span(xs):
    lo = math.log10(min(xs))
    hi = math.log10(max(xs))
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    return lo, hi


def _lin_span(ys, pad=0.08):
    lo, hi = min(ys), max(ys)
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5 * abs(lo) - 1e-6, hi + 0.5 * abs(hi) + 1e-6
    span = hi - lo
    return lo - pad * span, hi + pad * span


class _Frame:
    """Maps data coordinates to pixel coordinates inside the plot box."""

    def __init__(self, x_lo, x_hi, y_lo, y_hi):
        self.x_lo, self.x_hi = x_lo, x_hi
        self.y_lo, self.y_hi = y_lo, y_hi

    def px(self, x_data):
        return ML + (x_data - self.x_lo) / (self.x_hi - self.x_lo) * PW

    def py(self, y_data):
        return MT + PH - (y_data - self.y_lo) / (self.y_hi - self.y_lo) * PH


def _axes(frame, xticks, yticks, y_labels, title, y_title):
    parts = [f'<rect x="{ML}" y="{MT}" width="{PW}" height="{PH}" class="axis"/>']
    for xv in xticks:
        px = frame.px(xv)
        parts.append(f'<line x1="{_f(px)}" y1="{MT}" x2="{_f(px)}" y2="{MT + PH}" class="grid"/>')
        parts.append(f'<text x="{_f(px - 12)}" y="{MT + PH + 18}">1e{int(round(xv))}</text>')
    for yv, lab in zip(yticks, y_labels):
        py = frame.py(yv)
        parts.append(f'<line x1="{ML}" y1="{_f(py)}" x2="{ML + PW}" y2="{_f(py)}" class="grid"/>')
        parts.append(f'<text x="{_f(ML - 70)}" y="{_f(py + 4)}">{lab}</text>')
    parts.append(f'<text x="{ML}" y="{MT - 14}" class="title">{title}</text>')
    parts.append(f'<text x="{ML}" y="{MT - 2}">{y_title}</text>')
    parts.append(f'<text x="{_f(ML + PW - 80)}" y="{MT + PH + 36}">threshold x (log)</text>')
    return parts


def _document(parts):
    body = "".join(parts)
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
            f'viewBox="0 0 {W} {H}"><style>{STYLE}</style>'
            f'<rect width="{W}" height="{H}" fill="#fff"/>{body}</svg>')


def _decade_ticks(x_lo, x_hi):
    first = math.ceil(x_lo - 1e-9)
    last = math.floor(x_hi + 1e-9)
    return [v for v in range(first, last + 1)]


def _poly(points, cls):
    coords = " ".join(f"{_f(px)},{_f(py)}" for px, py in points)
    return f'<polyline points="{coords}" class="{cls}"/>'


def _markers(points):
    return "".join(f'<circle cx="{_f(px)}" cy="{_f(py)}" r="3" class="pt"/>'
                   for px, py in points)


def _ratio_chart(xs, ys, bands, asymptote, title, y_title):
    lx = [math.log10(x) for x in xs]
    x_lo, x_hi = _log_span(xs)
    pool = list(ys)
    for lo, hi in bands:
        pool.extend([lo, hi])
    if asymptote is not None:
        pool.append(asymptote)
    y_lo, y_hi = _lin_span(pool)
    frame = _Frame(x_lo, x_hi, y_lo, y_hi)
    yticks = [y_lo + k * (y_hi - y_lo) / 4.0 for k in range(5)]
    parts = _axes(frame, _decade_ticks(x_lo, x_hi), yticks,
                  [_label(v) for v in yticks], title, y_title)
    upper = [(frame.px(v), frame.py(b[1])) for v, b in zip(lx, bands)]
    lower = [(frame.px(v), frame.py(b[0])) for v, b in zip(lx, bands)]
    if len(upper) > 1:
        coords = " ".join(f"{_f(px)},{_f(py)}" for px, py in upper + lower[::-1])
        parts.append(f'<polygon points="{coords}" class="band"/>')
    else:
        (px, py_hi), (_, py_lo) = upper[0], lower[0]
        parts.append(f'<line x1="{_f(px)}" y1="{_f(py_hi)}" x2="{_f(px)}" '
                     f'y2="{_f(py_lo)}" class="curve"/>')
    if asymptote is not None:
        py = frame.py(asymptote)
        parts.append(f'<line x1="{ML}" y1="{_f(py)}" x2="{ML + PW}" y2="{_f(py)}" class="asym"/>')
        parts.append(f'<text x="{_f(ML + PW - 150)}" y="{_f(py - 6)}">'
                     f'asymptote {_label(asymptote)}</text>')
    pts = [(frame.px(v), frame.py(y)) for v, y in zip(lx, ys)]
    if len(pts) > 1:
        parts.append(_poly(pts, "curve"))
    parts.append(_markers(pts))
    return _document(parts)


def render_tail_ratio(report: TailRatioReport) -> str:
    xs = [s.x for s in report.stats]
    ys = [s.ratio for s in report.stats]
    bands = [(s.ci_lo, s.ci_hi) for s in report.stats]
    return _ratio_chart(xs, ys, bands, report.predicted_constant,
                        f"product-tail ratio, N={report.n_samples}, seed={report.seed}",
                        "P(XY&gt;x)/tail_F(x)")


def render_ruin(result: RuinResult) -> str:
    xs = [r.x for r in result.rows]
    ys = [r.ratio_to_prediction for r in result.rows]
    bands = []
    for r in result.rows:
        half = 2.0 * r.stderr / r.prediction if r.prediction > 0 else 0.0
        bands.append((r.ratio_to_prediction - half, r.ratio_to_prediction + half))
    horizon = "inf" if result.horizon == "infinite" else str(result.n)
    return _ratio_chart(xs, ys, bands, 1.0,
                        f"ruin ratio to prediction, n={horizon}, "
                        f"N={result.n_samples}, seed={result.seed}",
                        "psi_hat/prediction")


def render_cd_diagnostic(diag: CdDiagnostic) -> str:
    xs = [r.x for r in diag.rows]
    devs = [max(r.sup_deviation, 1e-16) for r in diag.rows]
    lx = [math.log10(x) for x in xs]
    ly = [math.log10(d) for d in devs]
    x_lo, x_hi = _log_span(xs)
    y_lo, y_hi = _lin_span(ly + [0.0], pad=0.1)  # include the deviation-1 line
    frame = _Frame(x_lo, x_hi, y_lo, y_hi)
    yticks = [y_lo + k * (y_hi - y_lo) / 4.0 for k in range(5)]
    parts = _axes(frame, _decade_ticks(x_lo, x_hi), yticks,
                  [f"1e{_label(v)}" for v in yticks],
                  f"uniformity diagnostic ({diag.policy})", "sup deviation (log)")
    py1 = frame.py(0.0)
    parts.append(f'<line x1="{ML}" y1="{_f(py1)}" x2="{ML + PW}" y2="{_f(py1)}" class="asym"/>')
    parts.append(f'<text x="{_f(ML + PW - 210)}" y="{_f(py1 - 6)}">deviation = 1 (not-CD trigger)</text>')
    pts = [(frame.px(a), frame.py(b)) for a, b in zip(lx, ly)]
    if len(pts) > 1:
        parts.append(_poly(pts, "curve"))
    parts.append(_markers(pts))
    parts.append(f'<text x="{ML + 8}" y="{MT + 18}" class="title">verdict: {diag.verdict}</text>')
    return _document(parts)


def render_chart(report, path: str) -> None:
    """Render the matching chart for a report and write it atomically."""
    if isinstance(report, TailRatioReport):
        svg = render_tail_ratio(report)
    elif isinstance(report, CdDiagnostic):
        svg = render_cd_diagnostic(report)
    elif isinstance(report, RuinResult):
        svg = render_ruin(report)
    else:
        raise TypeError(f"no chart defined for {type(report).__name__}")
    if not report_nonempty(report):
        raise ValueError("refusing to chart an empty report")
    write_atomic(path, svg)


def report_nonempty(report) -> bool:
    if isinstance(report, TailRatioReport):
        return bool(report.stats)
    if isinstance(report, CdDiagnostic):
        return bool(report.rows)
    return bool(report.rows)


def write_atomic(path: str, text: str) -> None:
    """Write via a temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tailprod-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
