/**
 * Readers for the sweep outputs: the CSV of per-point currents and the
 * `.resonances.json` sidecar with predicted zeros, located resonances and
 * the incoherence-vs-current fit.
 */

export class SchemaMismatch extends Error {}
export class EmptyInput extends Error {}

export const CSV_HEADER =
  "omega1_over_omega,gamma,model,current,converged,periods,incoherence";

export interface SweepRow {
  omega1OverOmega: number;
  gamma: number;
  model: "quantum" | "classical";
  current: number;
  converged: boolean;
  periods: number;
  /** NaN for classical rows (the rate model has no coherences). */
  incoherence: number;
}

export interface Resonance {
  predicted: number;
  located: number;
  minimum: number;
  shoulder: number;
  depth: number;
}

export interface ResonanceReport {
  gamma: number;
  resonances: Resonance[];
}

export interface CoherenceFit {
  slope: number;
  intercept: number;
  r_squared: number;
}

export interface Sidecar {
  predicted_zeros: number[];
  resonances: ResonanceReport[];
  coherence_fit: CoherenceFit | null;
}

function parseNumber(raw: string, line: number, column: string): number {
  if (raw === "") return NaN;
  const value = Number(raw);
  if (Number.isNaN(value)) {
    throw new SchemaMismatch(`line ${line}: bad ${column} value ${JSON.stringify(raw)}`);
  }
  return value;
}

export function parseSweepCsv(text: string): SweepRow[] {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) throw new EmptyInput("CSV file is empty");
  if (lines[0] !== CSV_HEADER) {
    throw new SchemaMismatch(`unexpected CSV header: ${JSON.stringify(lines[0])}`);
  }
  const rows: SweepRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i]!.split(",");
    if (parts.length !== 7) {
      throw new SchemaMismatch(`line ${i + 1}: expected 7 columns, got ${parts.length}`);
    }
    const model = parts[2]!;
    if (model !== "quantum" && model !== "classical") {
      throw new SchemaMismatch(`line ${i + 1}: unknown model ${JSON.stringify(model)}`);
    }
    const converged = parts[4]!;
    if (converged !== "true" && converged !== "false") {
      throw new SchemaMismatch(`line ${i + 1}: bad converged flag ${JSON.stringify(converged)}`);
    }
    rows.push({
      omega1OverOmega: parseNumber(parts[0]!, i + 1, "omega1_over_omega"),
      gamma: parseNumber(parts[1]!, i + 1, "gamma"),
      model,
      current: parseNumber(parts[3]!, i + 1, "current"),
      converged: converged === "true",
      periods: parseNumber(parts[5]!, i + 1, "periods"),
      incoherence: parseNumber(parts[6] ?? "", i + 1, "incoherence"),
    });
  }
  if (rows.length === 0) throw new EmptyInput("CSV has a header but no rows");
  return rows;
}

export function parseSidecar(text: string): Sidecar {
  let payload: unknown;
  try {
    payload = JSON.parse(text);
  } catch (err) {
    throw new SchemaMismatch(`sidecar is not valid JSON: ${String(err)}`);
  }
  const obj = payload as Partial<Sidecar>;
  if (!Array.isArray(obj.predicted_zeros) || !Array.isArray(obj.resonances)) {
    throw new SchemaMismatch("sidecar missing predicted_zeros/resonances arrays");
  }
  return {
    predicted_zeros: obj.predicted_zeros,
    resonances: obj.resonances,
    coherence_fit: obj.coherence_fit ?? null,
  };
}

/** Distinct gamma values of one model, in file (= ascending) order. */
export function gammaValues(rows: SweepRow[], model: SweepRow["model"]): number[] {
  const seen: number[] = [];
  for (const row of rows) {
    if (row.model === model && !seen.includes(row.gamma)) seen.push(row.gamma);
  }
  return seen;
}

export function curveFor(
  rows: SweepRow[],
  model: SweepRow["model"],
  gamma: number,
): SweepRow[] {
  return rows
    .filter((r) => r.model === model && r.gamma === gamma)
    .sort((a, b) => a.omega1OverOmega - b.omega1OverOmega);
}

/** Ordinary least squares through (x, y); mirrors the producer's fit. */
export function fitLine(points: Array<[number, number]>): CoherenceFit {
  if (points.length < 2) throw new EmptyInput("need at least 2 points to fit");
  const n = points.length;
  const mx = points.reduce((s, p) => s + p[0], 0) / n;
  const my = points.reduce((s, p) => s + p[1], 0) / n;
  let sxx = 0;
  let sxy = 0;
  let syy = 0;
  for (const [x, y] of points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (sxx === 0) throw new SchemaMismatch("all abscissae identical; cannot fit");
  const slope = sxy / sxx;
  const intercept = my - slope * mx;
  let ssRes = 0;
  for (const [x, y] of points) {
    const d = y - (slope * x + intercept);
    ssRes += d * d;
  }
  const r2 = syy === 0 ? 1 : 1 - ssRes / syy;
  return { slope, intercept, r_squared: Math.min(Math.max(r2, 0), 1) };
}

/**
 * The (current, incoherence) point for each gamma at the first resonance:
 * the quantum row nearest the located minimum.
 */
export function coherencePoints(
  rows: SweepRow[],
  sidecar: Sidecar | null,
): Array<[number, number]> {
  const gammas = gammaValues(rows, "quantum");
  const points: Array<[number, number]> = [];
  for (const gamma of gammas) {
    const curve = curveFor(rows, "quantum", gamma);
    if (curve.length === 0) continue;
    let pick: SweepRow;
    const report = sidecar?.resonances.find((r) => r.gamma === gamma);
    const first = report?.resonances[0];
    if (first !== undefined) {
      pick = curve.reduce((best, row) =>
        Math.abs(row.omega1OverOmega - first.located) <
        Math.abs(best.omega1OverOmega - first.located)
          ? row
          : best,
      );
    } else {
      pick = curve.reduce((best, row) => (row.current < best.current ? row : best));
    }
    if (!Number.isNaN(pick.incoherence)) points.push([pick.current, pick.incoherence]);
  }
  return points;
}
