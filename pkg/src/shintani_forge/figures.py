"""Deterministic SVG/CSV emission of plane scenes.

A scene is a list of layers; each layer carries Shintani sets (drawn as the
phi images of their cells' boundary segments), pre-sampled curves, or point
markers. Output is byte-stable: fixed sampling counts, fixed decimal
formatting, viewport derived from the data bounding box with fixed padding,
and element order following the scene and canonical cell order.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .cones import ShintaniSet
from .embedding import RealEmbeddings, iv_mid_err
from .field import FieldElement
from .plane import CurveSample, PhiBasis, PlanePoint, _segment_logs
from fractions import Fraction


@dataclass
class Layer:
    kind: str  # "set" | "curves" | "points"
    payload: object
    color: str = "#1f4e9c"
    width: float = 1.0
    label: str = ""


@dataclass
class Scene:
    layers: list = dc_field(default_factory=list)

    def add_set(self, s: ShintaniSet, **kw):
        self.layers.append(Layer(kind="set", payload=s, **kw))

    def add_curves(self, curves, **kw):
        self.layers.append(Layer(kind="curves", payload=list(curves), **kw))

    def add_points(self, points, **kw):
        self.layers.append(Layer(kind="points", payload=list(points), **kw))


def set_boundary_faces(s: ShintaniSet):
    """Deduplicated 2-dimensional faces (as generator pairs) plus rays of the
    cells of a Shintani set, in canonical order."""
    faces = set()
    rays = set()
    for c in s.cones:
        if c.dim == 3:
            g = c.gens
            faces.update({(g[0], g[1]), (g[0], g[2]), (g[1], g[2])})
        elif c.dim == 2:
            faces.add(c.gens)
        else:
            rays.add(c.gens[0])
    return sorted(faces), sorted(rays)


def sample_face_curve(
    pair,
    basis: PhiBasis,
    emb: RealEmbeddings,
    n_points: int,
    bits: int,
    curve_id: str,
) -> CurveSample:
    """phi image of the embedded segment between two generator rays."""
    e_from = emb.embed_positive(FieldElement(emb.spec, tuple(Fraction(v) for v in pair[0])), bits)
    e_to = emb.embed_positive(FieldElement(emb.spec, tuple(Fraction(v) for v in pair[1])), bits)
    pts = []
    ts = []
    for j in range(n_points):
        t = Fraction(j, n_points - 1)
        ts.append(t)
        logs = _segment_logs(e_from, e_to, t, bits)
        a, b = basis.project_logs(logs)
        ax, ae = iv_mid_err(a)
        bx, be = iv_mid_err(b)
        pts.append(PlanePoint(ax, bx, max(ae, be)))
    return CurveSample(curve_id=(curve_id,), ts=tuple(ts), points=tuple(pts))


def ray_point(ray, basis: PhiBasis, emb: RealEmbeddings, bits: int) -> PlanePoint:
    x = FieldElement(emb.spec, tuple(Fraction(v) for v in ray))
    logs = emb.log_embed(x, bits)
    a, b = basis.project_logs(logs)
    ax, ae = iv_mid_err(a)
    bx, be = iv_mid_err(b)
    return PlanePoint(ax, bx, max(ae, be))


def materialize_scene(
    scene: Scene,
    emb: RealEmbeddings,
    basis_pair,
    n_points: int = 33,
    bits: int = 96,
):
    """Expand set layers into concrete curves/markers; returns a list of
    (layer, curves, markers)."""
    basis = PhiBasis(emb, basis_pair[0], basis_pair[1], bits)
    out = []
    for li, layer in enumerate(scene.layers):
        curves = []
        markers = []
        if layer.kind == "set":
            faces, rays = set_boundary_faces(layer.payload)
            for fi, pair in enumerate(faces):
                curves.append(
                    sample_face_curve(
                        pair, basis, emb, n_points, bits, f"layer{li}/face{fi}"
                    )
                )
            for ray in rays:
                markers.append(ray_point(ray, basis, emb, bits))
        elif layer.kind == "curves":
            for ci, cs in enumerate(layer.payload):
                curves.append(cs)
        elif layer.kind == "points":
            markers.extend(layer.payload)
        else:
            raise ValueError(f"unknown layer kind {layer.kind!r}")
        out.append((layer, curves, markers))
    return out


def render_svg_csv(materialized, svg_path, csv_path, size: int = 640, pad: float = 0.05):
    """Write the SVG document and the CSV table of all sampled points."""
    xs = []
    ys = []
    for _, curves, markers in materialized:
        for cs in curves:
            xs.extend(p.x for p in cs.points)
            ys.extend(p.y for p in cs.points)
        xs.extend(p.x for p in markers)
        ys.extend(p.y for p in markers)
    if not xs:
        x0, x1, y0, y1 = 0.0, 1.0, 0.0, 1.0
    else:
        x0, x1 = min(xs), max(xs)
        y0, y1 = min(ys), max(ys)
        if x1 == x0:
            x1 = x0 + 1.0
        if y1 == y0:
            y1 = y0 + 1.0
    dx = (x1 - x0) * pad
    dy = (y1 - y0) * pad
    x0, x1, y0, y1 = x0 - dx, x1 + dx, y0 - dy, y1 + dy
    sx = size / (x1 - x0)
    sy = size / (y1 - y0)

    def tx(x):
        return (x - x0) * sx

    def ty(y):
        return size - (y - y0) * sy

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" '
        f'height="{size}" viewBox="0 0 {size} {size}">',
        f'<!-- bbox {x0:.9g} {y0:.9g} {x1:.9g} {y1:.9g} -->',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="#ffffff"/>',
    ]
    csv_rows = ["curve_id,t,x,y,err"]
    for layer, curves, markers in materialized:
        for cs in curves:
            pts = " ".join(f"{tx(p.x):.3f},{ty(p.y):.3f}" for p in cs.points)
            lines.append(
                f'<polyline fill="none" stroke="{layer.color}" '
                f'stroke-width="{layer.width:.3f}" points="{pts}"/>'
            )
            cid = "/".join(str(v) for v in cs.curve_id).replace(",", ";").replace(" ", "")
            for t, p in zip(cs.ts, cs.points):
                csv_rows.append(f"{cid},{float(t):.12g},{p.x:.12g},{p.y:.12g},{p.err:.3g}")
        for p in markers:
            lines.append(
                f'<circle cx="{tx(p.x):.3f}" cy="{ty(p.y):.3f}" r="2.5" '
                f'fill="{layer.color}"/>'
            )
    lines.append("</svg>")
    with open(svg_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(csv_rows) + "\n")
    return svg_path, csv_path
