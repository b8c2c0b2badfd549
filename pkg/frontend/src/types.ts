// Wire types of the session service. The client renders these verbatim and
// never computes a statistic of its own.

export interface SymbolView {
  letter: string; // "A" | "A'" | "B" | "B'"
  sign: number; // +1 | -1
}

export interface TrialView {
  trial_index: number;
  role: "alice" | "bob";
  plate_side: "left" | "right" | null;
  front: SymbolView;
  left: SymbolView;
  right: SymbolView;
  suggested_letter: string;
  // present only in nonlocal mode for Alice; null until Bob has chosen
  bob_letter?: string | null;
}

export interface BellDoc {
  defined: boolean;
  exact: boolean;
  n_trials: number;
  s_value: number | null;
  s_stderr: number | null;
  p_hat: number | null;
  classical_bound: number;
  violation_z: number | null;
  [key: string]: number | boolean | null; // correlator_* and marginal_* fields
}

export interface HandednessDoc {
  left: BellDoc;
  right: BellDoc;
  p_hat_left: number | null;
  p_hat_right: number | null;
  difference: number | null;
  difference_stderr: number | null;
  verdict: "left_biased" | "right_biased" | "inconclusive";
  sigma_threshold: number;
}

export interface StatsDoc {
  n_trials: number;
  bell: BellDoc;
  handedness: HandednessDoc;
  accept_rates: { left: number | null; right: number | null };
  served: { left: number; right: number };
  accepted: { left: number; right: number };
}

export interface RevealView {
  trial_index: number;
  alice_letter: string;
  alice_value: number;
  alice_accepted: boolean;
  alice_direction: number | null;
  bob_letter: string;
  bob_value: number;
  product: number;
  pair: string;
  stats: StatsDoc;
}

export interface WaitingView {
  phase: "awaiting_choice";
  waiting_for: "alice" | "bob";
}

export interface CreateResponse {
  session_id: string;
  mode: string;
  experiment_mode: "standard" | "nonlocal";
  seed: number;
  trial: TrialView;
  tokens?: { alice: string; bob: string };
}

export interface CloseResponse {
  session_id: string;
  final: StatsDoc;
  trial_log: Record<string, unknown>[];
}

export type AliceChoice = { action: "accept" } | { action: "reject"; direction?: "cw" | "ccw" };
export type BobChoice = { letter: "B" | "B'" };
export type Choice = AliceChoice | BobChoice;

export interface CreateOptions {
  mode: "human_alice" | "human_bob" | "human_both";
  experiment_mode?: "standard" | "nonlocal";
  seed?: number;
  alice_p?: number;
}
