// Typed client for the taxlab HTTP API. Every money/metric figure stays the
// decimal string the server sent; this module never does arithmetic on them.

export type BracketRecord = { lower_bgn: string; rate_bp: number };

export type ScheduleRecord = {
  period: "monthly" | "annual";
  mode: "marginal" | "slab";
  brackets: BracketRecord[];
};

export type ReliefRulesRecord = {
  voluntary_pension_cap_bp: number;
  insurance_cap_bp: number;
  donation_cap_bp: number;
  mortgage_principal_cap_bgn: string;
  child_relief_bgn: string[];
  disabled_child_relief_bgn: string;
  reduced_capacity_relief_bgn: string;
  reduced_capacity_threshold_pct: number;
};

export type PolicyRecord = {
  name: string;
  household_mode: "individual" | "per_member" | "nit";
  schedule: ScheduleRecord;
  relief_rules: ReliefRulesRecord | null;
  social_minimum_bgn: string | null;
  transfer_slope_bp: number;
  collection_rate_bp: number;
  pooled: boolean;
};

export type LorenzPoint = [string, string];

export type ReportRecord = {
  policy: string;
  period: string;
  households: number;
  persons: number;
  total_income_bgn: string;
  total_tax_bgn: string;
  total_revenue_bgn: string;
  collection_rate_bp: number;
  gini_pre: string | null;
  gini_post: string | null;
  redistribution: string | null;
  top_shares_pre: { percent: string; share: string }[];
  top_shares_post: { percent: string; share: string }[];
  decile_effective_rates: (string | null)[];
  lorenz_pre: LorenzPoint[];
  lorenz_post: LorenzPoint[];
};

export type BaselinePair = {
  policy_a: string;
  policy_b: string;
  households: number;
  winners: number;
  losers: number;
  unchanged: number;
  revenue_delta_bgn: string;
};

export type ComparisonRecord = {
  reports: ReportRecord[];
  against_baseline: BaselinePair[];
};

export type MemberRecord = {
  id?: string;
  role: "adult" | "child";
  monthly_income_bgn: string;
  claims?: Record<string, unknown>;
};

export type HouseholdRecord = { id?: string; members: MemberRecord[] };

// Per-member lines vary by household mode (annual slices for individual
// policies, monthly ones otherwise); the fields below are the common core.
export type MemberBreakdown = {
  member_id: string;
  role?: string;
  monthly_income_bgn: string;
  monthly_tax_bgn: string;
  [extra: string]: unknown;
};

export type NitBreakdown = {
  social_minimum_per_capita_bgn: string;
  household_minimum_bgn: string;
  taxable_excess_bgn: string;
  transfer_bgn: string;
  [extra: string]: unknown;
};

export type BreakdownRecord = {
  policy: string;
  household_mode: string;
  period: string;
  household_id: string;
  household_size: number;
  monthly_income_bgn: string;
  tax_bgn: string;
  post_tax_income_bgn: string;
  members: MemberBreakdown[];
  nit: NitBreakdown | null;
  pooled: { base_bgn: string; [extra: string]: unknown } | null;
};

export type PopulationSummary = {
  population_id: string;
  households: number;
  persons: number;
  total_income_bgn: string;
};

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type ErrorBody = { error?: { code?: string; message?: string } };

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, init);
  let body: unknown = null;
  try {
    body = await response.json();
  } catch {
    body = null;
  }
  if (!response.ok) {
    const detail = (body as ErrorBody | null)?.error;
    throw new ApiError(
      response.status,
      detail?.code ?? "http_error",
      detail?.message ?? `request failed with status ${response.status}`,
    );
  }
  return body as T;
}

export function createClient(baseUrl = "") {
  const post = <T>(path: string, payload: unknown, signal?: AbortSignal) =>
    request<T>(baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
      signal,
    });

  return {
    presets: () => request<{ presets: PolicyRecord[] }>(baseUrl + "/api/presets"),
    createPopulation: (synthesis: Record<string, number | boolean>) =>
      post<PopulationSummary>("/api/population", { synthesis }),
    evaluate: (populationId: string, policy: PolicyRecord, signal?: AbortSignal) =>
      post<ReportRecord>("/api/evaluate", { population_id: populationId, policy }, signal),
    compare: (populationId: string, policies: PolicyRecord[], signal?: AbortSignal) =>
      post<ComparisonRecord>("/api/compare", { population_id: populationId, policies }, signal),
    whatif: (household: HouseholdRecord, policy: PolicyRecord | string, signal?: AbortSignal) =>
      post<BreakdownRecord>("/api/household/whatif", { household, policy }, signal),
  };
}

export type Client = ReturnType<typeof createClient>;
