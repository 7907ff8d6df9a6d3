/** Client-side recency rule for the open signal. */

// Opening within this span of dispatch counts as immediate; the boundary
// itself is inclusive.
export const OPEN_RECENCY_MS = 60_000;

export type OpenSignal = "opened_immediately" | "opened_later";

export function openSignal(sentAtIso: string, nowMs: number): OpenSignal {
  const sentMs = Date.parse(sentAtIso);
  if (Number.isNaN(sentMs)) {
    throw new Error(`unparseable dispatch time: ${sentAtIso}`);
  }
  return nowMs - sentMs <= OPEN_RECENCY_MS ? "opened_immediately" : "opened_later";
}
