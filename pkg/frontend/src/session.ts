/** Labeling session state and the rules the UI enforces around it.
 *
 * Selections live in two layers: `selections` is the draft the user is
 * editing (rendered optimistically) and `acked` is the last payload the
 * server acknowledged via submit. After every successful submit the two
 * are identical; the server's answer wins on reconciliation.
 */

export const LENGTH_IMBALANCE_RATIO = 3.0;

export interface UiSession {
  batchId: string;
  categories: string[];
  selections: Record<string, string[]>;
  acked: Record<string, string[]>;
  /** token counts of known documents, for the pre-submit imbalance check */
  tokenCounts: Record<string, number>;
  predictionFilter: string | null;
  predictionOrder: "asc" | "desc";
}

function emptySelections(categories: string[]): Record<string, string[]> {
  return Object.fromEntries(categories.map((c) => [c, []]));
}

export function newSession(batchId: string, categories: string[]): UiSession {
  return {
    batchId,
    categories,
    selections: emptySelections(categories),
    acked: emptySelections(categories),
    tokenCounts: {},
    predictionFilter: null,
    predictionOrder: "asc",
  };
}

export function rememberTokenCounts(
  session: UiSession,
  entries: Array<{ doc_id: string; token_count: number }>,
): UiSession {
  const tokenCounts = { ...session.tokenCounts };
  for (const entry of entries) {
    tokenCounts[entry.doc_id] = entry.token_count;
  }
  return { ...session, tokenCounts };
}

export function categoryOf(session: UiSession, docId: string): string | null {
  for (const category of session.categories) {
    if ((session.selections[category] ?? []).includes(docId)) {
      return category;
    }
  }
  return null;
}

/** Assign a document to a category; re-assigning moves it, clicking the
 * same category again removes it. */
export function toggleSelection(
  session: UiSession,
  category: string,
  docId: string,
): UiSession {
  if (!session.categories.includes(category)) {
    throw new Error(`unknown category: ${category}`);
  }
  const current = categoryOf(session, docId);
  const selections = Object.fromEntries(
    session.categories.map((c) => [
      c,
      (session.selections[c] ?? []).filter((id) => id !== docId),
    ]),
  );
  if (current !== category) {
    selections[category] = [...(selections[category] ?? []), docId];
  }
  return { ...session, selections };
}

/** Submission is allowed only once every category has a representative. */
export function canSubmit(session: UiSession): boolean {
  return session.categories.every(
    (c) => (session.selections[c] ?? []).length > 0,
  );
}

export function missingCategories(session: UiSession): string[] {
  return session.categories.filter(
    (c) => (session.selections[c] ?? []).length === 0,
  );
}

export function selectedIds(session: UiSession): string[] {
  return session.categories.flatMap((c) => session.selections[c] ?? []);
}

/** True when the selected documents' token counts differ by more than the
 * ratio the service itself warns about. Checked before submit so the user
 * sees the skew risk while still choosing. */
export function hasLengthImbalance(session: UiSession): boolean {
  const counts = selectedIds(session)
    .map((id) => session.tokenCounts[id])
    .filter((n): n is number => typeof n === "number" && n > 0);
  if (counts.length < 2) {
    return false;
  }
  return Math.max(...counts) / Math.min(...counts) > LENGTH_IMBALANCE_RATIO;
}

/** Reconcile against a server acknowledgement: the acked payload becomes
 * both what is shown and the new baseline. */
export function applyServerAck(
  session: UiSession,
  ackedSelections: Record<string, string[]>,
): UiSession {
  const copy = Object.fromEntries(
    session.categories.map((c) => [c, [...(ackedSelections[c] ?? [])]]),
  );
  return {
    ...session,
    selections: structuredClone(copy),
    acked: structuredClone(copy),
  };
}

export function hasUnsavedChanges(session: UiSession): boolean {
  return session.categories.some((c) => {
    const draft = session.selections[c] ?? [];
    const acked = session.acked[c] ?? [];
    return (
      draft.length !== acked.length || draft.some((id, i) => acked[i] !== id)
    );
  });
}
