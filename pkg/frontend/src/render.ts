// Pure rendering: server documents in, screen models out. Nothing here
// computes a statistic or peeks beyond the fields the server sent.

import type { ClientSessionState } from "./session.js";
import type { BellDoc, RevealView, StatsDoc, SymbolView, TrialView } from "./types.js";

const PLACEHOLDER = "—";

const PAIR_DISPLAY: Record<string, string> = {
  ab: "AB",
  a_prime_b: "A'B",
  ab_prime: "AB'",
  a_prime_b_prime: "A'B'",
};

export interface Action {
  id: string;
  label: string;
}

export interface SymbolSlot {
  position: "front" | "left" | "right";
  glyph: string;
  suggested: boolean;
}

export interface TrialScreen {
  kind: "trial";
  trialIndex: number;
  role: "alice" | "bob";
  plateSide: "left" | "right" | null;
  slots: SymbolSlot[];
  actions: Action[];
  bobLetter: string | null;
  awaitingBobLetter: boolean;
}

export interface ErrorBanner {
  kind: "error";
  message: string;
}

export function glyph(symbol: SymbolView): string {
  return `${symbol.letter}${symbol.sign > 0 ? "+" : "-"}`;
}

function validSymbol(symbol: unknown): symbol is SymbolView {
  if (typeof symbol !== "object" || symbol === null) {
    return false;
  }
  const doc = symbol as SymbolView;
  return typeof doc.letter === "string" && (doc.sign === 1 || doc.sign === -1);
}

export function renderTrial(view: TrialView): TrialScreen | ErrorBanner {
  if (
    !view ||
    typeof view.trial_index !== "number" ||
    !validSymbol(view.front) ||
    !validSymbol(view.left) ||
    !validSymbol(view.right)
  ) {
    return { kind: "error", message: "malformed trial view from server" };
  }
  const slots: SymbolSlot[] = (["front", "left", "right"] as const).map((position) => ({
    position,
    glyph: glyph(view[position]),
    suggested: position === "front",
  }));

  const nonlocal = "bob_letter" in view;
  const bobLetter = view.bob_letter ?? null;
  let actions: Action[];
  if (view.role === "bob") {
    actions = [
      { id: "choose-B", label: "measure B" },
      { id: "choose-B'", label: "measure B'" },
    ];
  } else if (nonlocal && bobLetter !== null) {
    actions = [
      { id: "accept", label: `measure suggested (${view.suggested_letter})` },
      { id: "reject-cw", label: "measure the other, walking clockwise" },
      { id: "reject-ccw", label: "measure the other, walking counter-clockwise" },
    ];
  } else if (nonlocal) {
    // direction buttons only once Bob's letter has been communicated
    actions = [{ id: "accept", label: `measure suggested (${view.suggested_letter})` }];
  } else {
    actions = [
      { id: "accept", label: `measure suggested (${view.suggested_letter})` },
      { id: "reject", label: "measure the other" },
    ];
  }
  return {
    kind: "trial",
    trialIndex: view.trial_index,
    role: view.role,
    plateSide: view.plate_side,
    slots,
    actions,
    bobLetter,
    awaitingBobLetter: nonlocal && bobLetter === null,
  };
}

export interface RevealScreen {
  kind: "reveal";
  trialIndex: number;
  aliceLine: string;
  bobLine: string;
  productLine: string;
  accepted: boolean;
}

export function renderReveal(reveal: RevealView): RevealScreen {
  const sign = (value: number) => (value > 0 ? "+1" : "-1");
  const bucket = PAIR_DISPLAY[reveal.pair] ?? reveal.pair;
  return {
    kind: "reveal",
    trialIndex: reveal.trial_index,
    aliceLine: `Alice ${reveal.alice_accepted ? "accepted" : "rejected"}: ${reveal.alice_letter} = ${sign(reveal.alice_value)}`,
    bobLine: `Bob measured ${reveal.bob_letter} = ${sign(reveal.bob_value)}`,
    productLine: `product ${sign(reveal.product)} -> bucket ${bucket}`,
    accepted: reveal.alice_accepted,
  };
}

export interface DashboardRow {
  label: string;
  value: string;
  stderr: string;
  n: string;
}

export interface DashboardScreen {
  kind: "dashboard";
  nTrials: number;
  correlators: DashboardRow[];
  sValue: string;
  sStderr: string;
  sNumeric: number | null;
  classicalBound: number;
  storyCeiling: number;
  pHatLeft: string;
  pHatRight: string;
  acceptRateLeft: string;
  acceptRateRight: string;
  verdict: string;
}

function num(value: number | null | undefined, digits = 4): string {
  return value === null || value === undefined ? PLACEHOLDER : value.toFixed(digits);
}

function bellNumber(bell: BellDoc, key: string): number | null {
  const value = bell[key];
  return typeof value === "number" ? value : null;
}

export function renderDashboard(stats: StatsDoc | null): DashboardScreen {
  if (stats === null) {
    return {
      kind: "dashboard",
      nTrials: 0,
      correlators: Object.values(PAIR_DISPLAY).map((label) => ({
        label,
        value: PLACEHOLDER,
        stderr: PLACEHOLDER,
        n: "0",
      })),
      sValue: PLACEHOLDER,
      sStderr: PLACEHOLDER,
      sNumeric: null,
      classicalBound: 2,
      storyCeiling: 4,
      pHatLeft: PLACEHOLDER,
      pHatRight: PLACEHOLDER,
      acceptRateLeft: PLACEHOLDER,
      acceptRateRight: PLACEHOLDER,
      verdict: PLACEHOLDER,
    };
  }
  const bell = stats.bell;
  const correlators = Object.entries(PAIR_DISPLAY).map(([key, label]) => ({
    label,
    value: num(bellNumber(bell, `correlator_${key}`)),
    stderr: num(bellNumber(bell, `correlator_${key}_stderr`)),
    n: String(bellNumber(bell, `correlator_${key}_n`) ?? 0),
  }));
  return {
    kind: "dashboard",
    nTrials: stats.n_trials,
    correlators,
    sValue: num(bell.s_value),
    sStderr: num(bell.s_stderr),
    sNumeric: bell.s_value,
    classicalBound: bell.classical_bound,
    storyCeiling: 4,
    pHatLeft: num(stats.handedness.p_hat_left),
    pHatRight: num(stats.handedness.p_hat_right),
    acceptRateLeft: num(stats.accept_rates.left, 3),
    acceptRateRight: num(stats.accept_rates.right, 3),
    verdict: stats.handedness.verdict ?? PLACEHOLDER,
  };
}

export interface AppScreen {
  phase: string;
  banner: string | null;
  trial: TrialScreen | ErrorBanner | null;
  reveal: RevealScreen | null;
  dashboard: DashboardScreen;
  waitingFor: string | null;
}

/** The whole page as a pure function of the client state snapshot. */
export function renderApp(state: ClientSessionState): AppScreen {
  return {
    phase: state.phase,
    banner: state.error,
    trial: state.phase === "awaiting_choice" && state.trial ? renderTrial(state.trial) : null,
    reveal: state.phase === "revealed" && state.reveal ? renderReveal(state.reveal) : null,
    dashboard: renderDashboard(state.stats),
    waitingFor: state.waitingFor,
  };
}
