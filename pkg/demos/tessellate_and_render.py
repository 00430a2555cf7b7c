"""Build a Voronoi tessellation of the unit square and render it to SVG.

Writes demos/out/tessellation.svg with cells filled by a fair coin coloring.
"""

from pathlib import Path

import numpy as np

from voronoiperc import Rect, build_tessellation, draw_coloring, sample_binomial

OUT = Path(__file__).parent / "out"


def main() -> None:
    window = Rect(rho=1.0, area=1.0)
    tess = build_tessellation(sample_binomial(window, 200, seed=7))
    coloring = draw_coloring(tess, seed=8)

    print(f"{tess.n_cells} cells, {len(tess.edges)} shared edges")
    print(f"total area {tess.areas.sum():.12f} (window area {window.area})")
    degs = np.array([len(nb) for nb in tess.neighbors])
    print(f"neighbor count: min {degs.min()}, mean {degs.mean():.2f}, max {degs.max()}")
    print(f"largest cell radius {tess.radii.max():.4f}")
    touching = tess.side_touch.any(axis=1).sum()
    print(f"{touching} cells touch the boundary, {coloring.bits.sum()} of {tess.n_cells} are red")

    OUT.mkdir(exist_ok=True)
    path = OUT / "tessellation.svg"
    xmin, xmax, ymin, ymax = window.bounds
    scale = 600.0 / (xmax - xmin)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="600" height="600" '
        f'viewBox="0 0 600 600">'
    ]
    for poly, red in zip(tess.cells, coloring.bits):
        pts = " ".join(
            f"{(x - xmin) * scale:.1f},{(ymax - y) * scale:.1f}" for x, y in poly
        )
        fill = "#d33" if red else "#47a"
        parts.append(f'<polygon points="{pts}" fill="{fill}" stroke="white" stroke-width="0.6"/>')
    parts.append("</svg>")
    path.write_text("\n".join(parts), encoding="utf-8")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
