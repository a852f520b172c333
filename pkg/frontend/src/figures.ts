/**
 * The two figure kinds built from a sweep:
 *  - "resonances": current vs drive amplitude, one curve per dephasing value,
 *    with vertical guide lines at the predicted Bessel zeros;
 *  - "coherence_fit": incoherence vs current scatter at the first resonance
 *    with the fitted line and an R^2 annotation.
 */

import {
  CoherenceFit,
  EmptyInput,
  Sidecar,
  SweepRow,
  coherencePoints,
  curveFor,
  fitLine,
  gammaValues,
} from "./data.js";
import {
  Scale,
  formatTick,
  linearScale,
  logScale,
  polyline,
  svgDocument,
  tag,
} from "./svg.js";

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { top: 28, right: 24, bottom: 52, left: 86 };

const CURVE_COLORS = ["#1f63a8", "#d0641e", "#2e8540", "#8a4fb5", "#c23b51"];
const CLASSICAL_COLOR = "#666666";

export interface ResonanceFigureOptions {
  logY?: boolean;
  title?: string;
}

function plotArea(): { x0: number; x1: number; y0: number; y1: number } {
  return {
    x0: MARGIN.left,
    x1: WIDTH - MARGIN.right,
    y0: HEIGHT - MARGIN.bottom,
    y1: MARGIN.top,
  };
}

function axes(
  xScale: Scale,
  yScale: Scale,
  xLabel: string,
  yLabel: string,
  yTickCount = 6,
): string {
  const { x0, x1, y0, y1 } = plotArea();
  const parts: string[] = [];
  parts.push(tag("line", { x1: x0, y1: y0, x2: x1, y2: y0, stroke: "#000" }));
  parts.push(tag("line", { x1: x0, y1: y0, x2: x0, y2: y1, stroke: "#000" }));
  for (const t of xScale.ticks(8)) {
    const px = xScale(t);
    parts.push(tag("line", { x1: px, y1: y0, x2: px, y2: y0 + 5, stroke: "#000" }));
    parts.push(
      tag("text", { x: px, y: y0 + 20, "text-anchor": "middle" }, formatTick(t)),
    );
  }
  for (const t of yScale.ticks(yTickCount)) {
    const py = yScale(t);
    parts.push(tag("line", { x1: x0 - 5, y1: py, x2: x0, y2: py, stroke: "#000" }));
    parts.push(
      tag(
        "text",
        { x: x0 - 9, y: py + 4, "text-anchor": "end" },
        formatTick(t),
      ),
    );
  }
  parts.push(
    tag(
      "text",
      { x: (x0 + x1) / 2, y: HEIGHT - 12, "text-anchor": "middle" },
      xLabel,
    ),
  );
  parts.push(
    tag(
      "text",
      {
        x: 18,
        y: (y0 + y1) / 2,
        "text-anchor": "middle",
        transform: `rotate(-90 18 ${(y0 + y1) / 2})`,
      },
      yLabel,
    ),
  );
  return parts.join("\n");
}

function gammaLabel(gamma: number): string {
  return gamma === 0 ? "γ = 0" : `γ = ${gamma.toExponential(1).replace("+", "")}`;
}

export function renderResonanceFigure(
  rows: SweepRow[],
  sidecar: Sidecar | null,
  options: ResonanceFigureOptions = {},
): string {
  const quantumGammas = gammaValues(rows, "quantum");
  const classicalGammas = gammaValues(rows, "classical");
  if (quantumGammas.length === 0 && classicalGammas.length === 0) {
    throw new EmptyInput("no rows to plot");
  }
  const { x0, x1, y0, y1 } = plotArea();

  const xs = rows.map((r) => r.omega1OverOmega);
  const ys = rows.map((r) => r.current).filter((v) => Number.isFinite(v));
  const xScale = linearScale([Math.min(...xs), Math.max(...xs)], [x0, x1]);
  const yMax = Math.max(...ys);
  const yMinPositive = Math.min(...ys.filter((v) => v > 0));
  const yScale = options.logY
    ? logScale([yMinPositive, yMax], [y0, y1])
    : linearScale([0, yMax * 1.05], [y0, y1]);

  const parts: string[] = [];
  parts.push(
    axes(xScale, yScale, "drive amplitude / drive frequency", "current (1/s)"),
  );

  for (const zero of sidecar?.predicted_zeros ?? []) {
    if (zero < xScale.domain[0] || zero > xScale.domain[1]) continue;
    const px = xScale(zero);
    parts.push(
      tag("line", {
        x1: px,
        y1: y0,
        x2: px,
        y2: y1,
        stroke: "#999",
        "stroke-dasharray": "5 4",
        class: "guide-zero",
      }),
    );
    parts.push(
      tag(
        "text",
        { x: px, y: y1 - 6, "text-anchor": "middle", fill: "#666" },
        formatTick(zero),
      ),
    );
  }

  let legendY = y1 + 12;
  const legend = (label: string, color: string) => {
    const entry =
      tag("line", {
        x1: x1 - 150,
        y1: legendY,
        x2: x1 - 126,
        y2: legendY,
        stroke: color,
        "stroke-width": 2,
      }) + tag("text", { x: x1 - 120, y: legendY + 4 }, label);
    legendY += 18;
    return entry;
  };

  quantumGammas.forEach((gamma, i) => {
    const color = CURVE_COLORS[i % CURVE_COLORS.length]!;
    const pts = curveFor(rows, "quantum", gamma).map(
      (r): [number, number] => [xScale(r.omega1OverOmega), yScale(r.current)],
    );
    parts.push(
      polyline(pts, { stroke: color, "stroke-width": 1.8, class: "curve-quantum" }),
    );
    parts.push(legend(gammaLabel(gamma), color));
  });
  classicalGammas.forEach((gamma) => {
    const pts = curveFor(rows, "classical", gamma).map(
      (r): [number, number] => [xScale(r.omega1OverOmega), yScale(r.current)],
    );
    parts.push(
      polyline(pts, {
        stroke: CLASSICAL_COLOR,
        "stroke-width": 1.8,
        "stroke-dasharray": "7 3",
        class: "curve-classical",
      }),
    );
    parts.push(legend("rate model", CLASSICAL_COLOR));
  });

  if (options.title) {
    parts.push(
      tag("text", { x: x0, y: 16, "font-size": 14 }, options.title),
    );
  }
  return svgDocument(WIDTH, HEIGHT, parts.join("\n"));
}

export function renderCoherenceFigure(
  rows: SweepRow[],
  sidecar: Sidecar | null,
  title?: string,
): string {
  const points = coherencePoints(rows, sidecar);
  if (points.length === 0) throw new EmptyInput("no (current, incoherence) points");
  const fit: CoherenceFit | null =
    sidecar?.coherence_fit ?? (points.length >= 2 ? fitLine(points) : null);

  const { x0, x1, y0, y1 } = plotArea();
  const xsAll = points.map((p) => p[0]);
  const ysAll = points.map((p) => p[1]);
  const padX = (Math.max(...xsAll) - Math.min(...xsAll) || Math.max(...xsAll) || 1) * 0.08;
  const padY = (Math.max(...ysAll) - Math.min(...ysAll) || Math.max(...ysAll) || 1) * 0.08;
  const xScale = linearScale(
    [Math.min(...xsAll) - padX, Math.max(...xsAll) + padX],
    [x0, x1],
  );
  const yScale = linearScale(
    [Math.min(...ysAll) - padY, Math.max(...ysAll) + padY],
    [y0, y1],
  );

  const parts: string[] = [];
  parts.push(axes(xScale, yScale, "current (1/s)", "incoherence"));

  if (fit) {
    const [dx0, dx1] = xScale.domain;
    parts.push(
      polyline(
        [
          [xScale(dx0), yScale(fit.slope * dx0 + fit.intercept)],
          [xScale(dx1), yScale(fit.slope * dx1 + fit.intercept)],
        ],
        { stroke: "#d0641e", "stroke-width": 1.6, class: "fit-line" },
      ),
    );
    parts.push(
      tag(
        "text",
        { x: x1 - 8, y: y1 + 16, "text-anchor": "end", class: "fit-r2" },
        `R² = ${fit.r_squared.toFixed(3)}`,
      ),
    );
  }
  for (const [cx, cy] of points) {
    parts.push(
      tag("circle", {
        cx: xScale(cx).toFixed(2),
        cy: yScale(cy).toFixed(2),
        r: 4,
        fill: "#1f63a8",
        class: "scatter-point",
      }),
    );
  }
  if (title) parts.push(tag("text", { x: x0, y: 16, "font-size": 14 }, title));
  return svgDocument(WIDTH, HEIGHT, parts.join("\n"));
}
