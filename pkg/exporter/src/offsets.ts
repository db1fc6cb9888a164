/** Offset conversion between JavaScript strings and the corpus format.
 *
 * The corpus format counts Unicode code points; JavaScript string
 * indices count UTF-16 code units, which disagree as soon as a
 * character outside the Basic Multilingual Plane appears (emoji, some
 * CJK). Models report code-unit offsets, so every span is converted
 * before it reaches an output file.
 */

/** Number of code points in a string (what the corpus format calls
 * length). */
export function codePointLength(text: string): number {
  let n = 0;
  for (const _ of text) n += 1;
  return n;
}

/** Maps code-unit indices to code-point indices for one string. */
export class OffsetMap {
  /** pointAt[u] = code points strictly before code unit u; length is
   * text.length + 1 so both ends of a span look up directly. Interior
   * positions of a surrogate pair are marked invalid. */
  private readonly pointAt: Int32Array;

  constructor(text: string) {
    const pointAt = new Int32Array(text.length + 1).fill(-1);
    let unit = 0;
    let point = 0;
    for (const ch of text) {
      pointAt[unit] = point;
      unit += ch.length; // 2 for astral characters
      point += 1;
    }
    pointAt[unit] = point;
    this.pointAt = pointAt;
  }

  /** Code-point index for a code-unit index, or null when the unit
   * index splits a surrogate pair or falls outside the string. */
  toCodePoint(unitIndex: number): number | null {
    if (unitIndex < 0 || unitIndex >= this.pointAt.length) return null;
    const point = this.pointAt[unitIndex];
    return point === undefined || point < 0 ? null : point;
  }
}
