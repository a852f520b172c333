/** Synthetic sweep data shaped like the producer's desk-scale output. */

import { CSV_HEADER } from "../src/data.js";

const ZEROS = [12.225092264168708, 16.03777419058308];

function dipCurve(x: number, depth: number): number {
  let y = 1.3e6;
  for (const z of ZEROS) {
    y *= 1 - depth * Math.exp(-(((x - z) / 0.35) ** 2));
  }
  return y;
}

export function syntheticCsv(gammas = [0, 5e5, 1e6, 2e6]): string {
  const xs: number[] = [];
  for (let i = 0; i < 21; i++) xs.push(9.5 + (9 * i) / 20);
  xs.push(...ZEROS);
  xs.sort((a, b) => a - b);
  const lines = [CSV_HEADER];
  for (const [gi, gamma] of gammas.entries()) {
    const depth = 0.999 - 0.05 * gi;
    for (const x of xs) {
      const current = dipCurve(x, depth);
      const coh = 0.69 + 0.01 * gi + 1e-8 * (x - 9.5);
      lines.push(
        `${x},${gamma},quantum,${current.toPrecision(10)},true,12,${coh.toPrecision(10)}`,
      );
    }
  }
  for (const x of xs) {
    lines.push(`${x},0,classical,${(4e5 - 1e4 * (x - 9.5)).toPrecision(10)},true,9,`);
  }
  return lines.join("\n") + "\n";
}

export function syntheticSidecar(gammas = [0, 5e5, 1e6, 2e6]): string {
  const reports = gammas.map((gamma, gi) => ({
    gamma,
    resonances: ZEROS.map((z) => ({
      predicted: z,
      located: z,
      minimum: dipCurve(z, 0.999 - 0.05 * gi),
      shoulder: 1.3e6,
      depth: 0.999 - 0.05 * gi,
    })),
  }));
  return JSON.stringify({
    predicted_zeros: ZEROS,
    resonances: reports,
    coherence_fit: { slope: 4.3e-7, intercept: 0.69, r_squared: 0.97 },
  });
}
