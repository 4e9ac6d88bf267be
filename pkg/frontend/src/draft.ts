// Editable mirror of a policy record. Values stay the raw input strings until
// validation passes, and validation checks shape only (bracket order, number
// formats, mode combinations); tax arithmetic happens server-side.

import type { PolicyRecord, ScheduleRecord } from "./api";

export type BracketDraft = { lower: string; rate: string };

export type PolicyDraft = {
  name: string;
  mode: string;
  period: string;
  householdMode: string;
  pooled: boolean;
  socialMinimum: string;
  collectionRate: string;
  brackets: BracketDraft[];
  reliefChild: [string, string, string] | null;
  reliefDonationCap: string | null;
  // Non-edited relief fields ride along unchanged.
  reliefRules: PolicyRecord["relief_rules"];
  transferSlope: number;
  dirty: boolean;
};

export type DraftIssue = { field: string; index: number | null; message: string };

const MONEY = /^\d+(\.\d{1,2})?$/;
const WHOLE = /^\d+$/;

export function isMoneyText(text: string): boolean {
  return MONEY.test(text);
}

// Stotinki value for ordering checks only; inputs already matched MONEY.
function minorUnits(text: string): number {
  const [whole, frac = ""] = text.split(".");
  return parseInt(whole, 10) * 100 + parseInt((frac + "00").slice(0, 2), 10);
}

export function draftFromPolicy(record: PolicyRecord): PolicyDraft {
  const rules = record.relief_rules;
  return {
    name: record.name,
    mode: record.schedule.mode,
    period: record.schedule.period,
    householdMode: record.household_mode,
    pooled: record.pooled,
    socialMinimum: record.social_minimum_bgn ?? "",
    collectionRate: String(record.collection_rate_bp),
    brackets: record.schedule.brackets.map((b) => ({
      lower: b.lower_bgn,
      rate: String(b.rate_bp),
    })),
    reliefChild: rules ? [rules.child_relief_bgn[0], rules.child_relief_bgn[1], rules.child_relief_bgn[2]] : null,
    reliefDonationCap: rules ? String(rules.donation_cap_bp) : null,
    reliefRules: rules,
    transferSlope: record.transfer_slope_bp,
    dirty: false,
  };
}

export function validateDraft(draft: PolicyDraft): DraftIssue[] {
  const issues: DraftIssue[] = [];
  const bad = (field: string, message: string, index: number | null = null) =>
    issues.push({ field, index, message });

  if (!draft.name.trim()) bad("name", "policy name must not be empty");
  if (draft.mode !== "marginal" && draft.mode !== "slab") {
    bad("mode", `unknown mode '${draft.mode}'`);
  }
  if (draft.period !== "monthly" && draft.period !== "annual") {
    bad("period", `unknown period '${draft.period}'`);
  }
  const knownMode = ["individual", "per_member", "nit"].includes(draft.householdMode);
  if (!knownMode) bad("household_mode", `unknown household mode '${draft.householdMode}'`);

  if (draft.brackets.length === 0) bad("brackets", "a schedule needs at least one bracket");
  let previous: number | null = null;
  draft.brackets.forEach((bracket, i) => {
    let lower: number | null = null;
    if (!MONEY.test(bracket.lower)) {
      bad("lower", "lower bound must be a BGN amount like 300 or 300.00", i);
    } else {
      lower = minorUnits(bracket.lower);
    }
    if (lower !== null) {
      if (i === 0 && lower !== 0) bad("lower", "the first bracket must start at 0", i);
      if (previous !== null && lower <= previous) {
        bad("lower", "lower bounds must be strictly increasing", i);
      }
      previous = lower;
    }
    if (!WHOLE.test(bracket.rate) || parseInt(bracket.rate, 10) > 10_000) {
      bad("rate", "rate must be whole basis points between 0 and 10000", i);
    }
  });

  if (
    (draft.householdMode === "per_member" || draft.householdMode === "nit") &&
    draft.period !== "monthly"
  ) {
    bad("period", `${draft.householdMode} policies need a monthly schedule`);
  }
  if (draft.householdMode === "nit" && !MONEY.test(draft.socialMinimum)) {
    bad("social_minimum", "NIT needs a per-capita social minimum in BGN");
  }
  if (draft.pooled && draft.householdMode !== "per_member") {
    bad("pooled", "pooled taxation only applies in per_member mode");
  }
  if (!WHOLE.test(draft.collectionRate) || parseInt(draft.collectionRate, 10) > 10_000) {
    bad("collection_rate", "collection rate must be whole basis points between 0 and 10000");
  }
  if (draft.reliefChild) {
    draft.reliefChild.forEach((amount, i) => {
      if (!MONEY.test(amount)) bad("relief_child", "child relief must be a BGN amount", i);
    });
  }
  if (draft.reliefDonationCap !== null) {
    if (!WHOLE.test(draft.reliefDonationCap) || parseInt(draft.reliefDonationCap, 10) > 10_000) {
      bad("relief_donation_cap", "donation cap must be whole basis points between 0 and 10000");
    }
  }
  return issues;
}

// Only meaningful for a draft with no validation issues.
export function policyFromDraft(draft: PolicyDraft): PolicyRecord {
  const schedule: ScheduleRecord = {
    mode: draft.mode as ScheduleRecord["mode"],
    period: draft.period as ScheduleRecord["period"],
    brackets: draft.brackets.map((b) => ({
      lower_bgn: b.lower,
      rate_bp: parseInt(b.rate, 10),
    })),
  };
  const rules =
    draft.reliefRules && draft.reliefChild && draft.reliefDonationCap !== null
      ? {
          ...draft.reliefRules,
          child_relief_bgn: [...draft.reliefChild],
          donation_cap_bp: parseInt(draft.reliefDonationCap, 10),
        }
      : draft.reliefRules;
  return {
    name: draft.name.trim(),
    household_mode: draft.householdMode as PolicyRecord["household_mode"],
    schedule,
    relief_rules: rules,
    social_minimum_bgn: draft.socialMinimum === "" ? null : draft.socialMinimum,
    transfer_slope_bp: draft.transferSlope,
    collection_rate_bp: parseInt(draft.collectionRate, 10),
    pooled: draft.pooled,
  };
}
