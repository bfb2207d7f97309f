import {
  ArrangementSchema,
  CAPS_PER_ROW,
  type ArrangementDoc,
  type ProfileDoc,
  type ReportDoc,
} from "./types";

/**
 * Client-side board model.  Holds the cap order the user is editing plus the
 * last scored result.  Every mutation re-checks the permutation invariant, so
 * the emitted arrangement document is valid in every reachable state.  Scores
 * and profiles are never derived here; they are stored verbatim from the
 * service response.
 */
export class BoardState {
  private readonly caps: number[][];
  private reportDoc: ReportDoc | null = null;
  private profileDoc: ProfileDoc | null = null;
  private touched = new Set<number>();

  constructor(shuffled: ArrangementDoc) {
    const checked = ArrangementSchema.safeParse(shuffled);
    if (!checked.success) {
      throw new Error(`invalid served arrangement: ${checked.error.message}`);
    }
    this.caps = checked.data.rows.map((row) => [...row]);
  }

  /** Cap ids for one row in board order (positions 1..11). */
  rowCaps(row: number): readonly number[] {
    const caps = this.caps[row];
    if (caps === undefined) throw new RangeError(`row ${row} out of range`);
    return caps;
  }

  /**
   * Move the cap at `from` so it sits at `to` within the same row; the caps
   * in between shift by one.  Indices address the 11 movable positions
   * (0-based); the two anchors cannot be addressed at all.
   */
  moveCap(row: number, from: number, to: number): void {
    const caps = this.caps[row];
    if (caps === undefined) throw new RangeError(`row ${row} out of range`);
    for (const idx of [from, to]) {
      if (!Number.isInteger(idx) || idx < 0 || idx >= CAPS_PER_ROW) {
        throw new RangeError(`position ${idx} is not a movable slot`);
      }
    }
    if (from === to) return;
    const [cap] = caps.splice(from, 1);
    caps.splice(to, 0, cap as number);
    this.assertPermutation(row);
    this.onEdited(row);
  }

  /** Swap the cap with its neighbor; returns false at the row edge. */
  nudge(row: number, index: number, direction: -1 | 1): boolean {
    const target = index + direction;
    if (target < 0 || target >= CAPS_PER_ROW) return false;
    this.moveCap(row, index, target);
    return true;
  }

  /** Rearrange a whole row at once (still within-row, still a permutation). */
  setRow(row: number, order: readonly number[]): void {
    const caps = this.caps[row];
    if (caps === undefined) throw new RangeError(`row ${row} out of range`);
    const before = [...caps];
    caps.splice(0, CAPS_PER_ROW, ...order);
    try {
      this.assertPermutation(row);
    } catch (err) {
      caps.splice(0, CAPS_PER_ROW, ...before);
      throw err;
    }
    this.onEdited(row);
  }

  toArrangement(): ArrangementDoc {
    const doc = { rows: this.caps.map((row) => [...row]) };
    return ArrangementSchema.parse(doc);
  }

  /** Store a scored result exactly as the service returned it. */
  applyResult(report: ReportDoc, profile: ProfileDoc): void {
    this.reportDoc = report;
    this.profileDoc = profile;
  }

  get report(): ReportDoc | null {
    return this.reportDoc;
  }

  /** Only present after a scored submission; editing clears it again. */
  get profile(): ProfileDoc | null {
    return this.profileDoc;
  }

  rowTouched(row: number): boolean {
    return this.touched.has(row);
  }

  private onEdited(row: number): void {
    this.touched.add(row);
    // the shown profile always corresponds to the submitted arrangement
    this.reportDoc = null;
    this.profileDoc = null;
  }

  private assertPermutation(row: number): void {
    const caps = this.caps[row] ?? [];
    const seen = new Set(caps);
    if (caps.length !== CAPS_PER_ROW || seen.size !== CAPS_PER_ROW) {
      throw new Error(`row ${row} lost its permutation invariant: ${caps.join(",")}`);
    }
    for (let id = 1; id <= CAPS_PER_ROW; id += 1) {
      if (!seen.has(id)) {
        throw new Error(`row ${row} is missing cap ${id}`);
      }
    }
  }
}
