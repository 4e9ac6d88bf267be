// SVG Lorenz chart. Curve coordinates arrive as the API's decimal-string
// pairs; they are parsed only to position path points, never re-displayed.

import type { LorenzPoint } from "./api";

const SVG_NS = "http://www.w3.org/2000/svg";
const SIZE = 100;

export function curvePath(points: LorenzPoint[], size = SIZE): string {
  return points
    .map(([x, y], i) => {
      const px = (parseFloat(x) * size).toFixed(2);
      const py = (size - parseFloat(y) * size).toFixed(2);
      return `${i === 0 ? "M" : "L"}${px} ${py}`;
    })
    .join(" ");
}

function path(d: string, className: string): SVGPathElement {
  const p = document.createElementNS(SVG_NS, "path");
  p.setAttribute("d", d);
  p.setAttribute("class", className);
  return p;
}

export function renderLorenz(svg: SVGElement, pre: LorenzPoint[], post: LorenzPoint[]): void {
  svg.setAttribute("viewBox", `0 0 ${SIZE} ${SIZE}`);
  svg.setAttribute("preserveAspectRatio", "xMidYMid meet");
  svg.replaceChildren(
    path(`M0 ${SIZE} L${SIZE} 0`, "diagonal"),
    path(curvePath(pre), "curve pre"),
    path(curvePath(post), "curve post"),
  );
}
