"""Klein-disk pictures of orbits of a small base polygon, one panel per t.

Each unit disk fills a 512 x 512 block of the viewBox and is drawn 256 px
wide.  Points are taken in path-rescaled coordinates, so the horizontal axis
is x2/x1 and the vertical axis is the collapsing coordinate over x1; in an
HP panel that vertical offset is the fiber coordinate.
"""
import numpy as np

from .errors import ContractError
from .geom import conjugate_by_path_rescaling, to_projective4
from .reps import Representation

PANEL = 512
PANEL_PX = 256
POLY_SIDES = 6
POLY_RADIUS = 0.25
WORD_DEPTH = 2


def _fmt(x):
    return format(float(x), ".6f")


def base_polygon(dim, radius=POLY_RADIUS, sides=POLY_SIDES):
    n = 3 if dim == 2 else 4
    out = []
    for k in range(sides):
        a = 2 * np.pi * k / sides
        v = np.zeros(n)
        v[0] = 1.0
        v[1] = radius * np.cos(a)
        v[-1] = radius * np.sin(a)
        out.append(v)
    return np.array(out).T


def _words(n, depth):
    letters = [k for g in range(1, n + 1) for k in (g, -g)]
    words = [()]
    frontier = [()]
    for _ in range(depth):
        nxt = []
        for w in frontier:
            for k in letters:
                if w and w[-1] == -k:
                    continue
                nxt.append(w + (k,))
        words.extend(nxt)
        frontier = nxt
    return words


def orbit_polygons(rep, t, depth=WORD_DEPTH):
    gens = rep.presentation.generators
    mats = []
    for n in gens:
        m = to_projective4(rep.images[n], rep.dim).m
        mats.append(conjugate_by_path_rescaling(m, t) if t != 0 else m)
    invs = [np.linalg.inv(m) for m in mats]
    P = base_polygon(rep.dim)
    polys = []
    for w in _words(len(gens), depth):
        M = np.eye(P.shape[0])
        for k in w:
            M = M @ (mats[k - 1] if k > 0 else invs[-k - 1])
        X = M @ P
        if np.any(np.abs(X[0]) < 1e-12):
            continue
        X = X / X[0]
        polys.append(np.column_stack([X[1], X[-1]]))
    return polys


def _panel(i, row_t, polys, out):
    x0 = i * PANEL
    c = PANEL / 2
    out.append(f'<g id="panel-{i}" data-t="{_fmt(row_t)}">')
    out.append(f'<rect x="{x0}" y="0" width="{PANEL}" height="{PANEL}" fill="none" stroke="#999"/>')
    out.append(f'<line x1="{x0}" y1="{c}" x2="{x0 + PANEL}" y2="{c}" stroke="#ccc"/>')
    out.append(f'<line x1="{x0 + c}" y1="0" x2="{x0 + c}" y2="{PANEL}" stroke="#ccc"/>')
    out.append(f'<circle cx="{x0 + c}" cy="{c}" r="{c}" fill="none" stroke="#000"/>')
    for poly in polys:
        if np.abs(poly).max() > 1.0:
            continue
        pts = " ".join(f"{_fmt(x0 + c + c * x)},{_fmt(c - c * y)}" for x, y in poly)
        out.append(f'<polygon points="{pts}" fill="none" stroke="#1f4e9a" stroke-width="1"/>')
    out.append("</g>")


def render(rows, depth=WORD_DEPTH):
    """rows: iterable of (t, Representation).  Returns SVG text."""
    rows = list(rows)
    n = max(1, len(rows))
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{PANEL_PX * n}" '
           f'height="{PANEL_PX}" viewBox="0 0 {PANEL * n} {PANEL}">']
    if not rows:
        _panel(0, 0.0, [], out)
    for i, (t, rep) in enumerate(rows):
        _panel(i, t, orbit_polygons(rep, t, depth), out)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_report_json(obj, depth=WORD_DEPTH):
    """Render a TransitionReport JSON document (list of rows with
    representations)."""
    if isinstance(obj, dict) and "rows" in obj:
        obj = obj["rows"]
    if not isinstance(obj, list):
        raise ContractError("expected a transition report (list of rows)")
    rows = []
    for r in obj:
        if not isinstance(r, dict) or "t" not in r or "representation" not in r:
            raise ContractError("report row lacks t or representation")
        rows.append((float(r["t"]), Representation.from_json(r["representation"])))
    return render(rows, depth)


def panel_extents(svg_text):
    """Per-panel (width, height) of the drawn polygon vertices, in viewBox units."""
    import re
    out = []
    for g in re.findall(r'<g id="panel-\d+".*?</g>', svg_text, flags=re.S):
        pts = [tuple(map(float, p.split(","))) for poly in
               re.findall(r'points="([^"]*)"', g) for p in poly.split()]
        if not pts:
            out.append((0.0, 0.0))
            continue
        a = np.array(pts)
        out.append(tuple(float(v) for v in a.max(0) - a.min(0)))
    return out
