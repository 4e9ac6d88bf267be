// Behavioural tests against a mocked fetch whose response bodies are
// fixtures captured from the real API, so every asserted figure is the
// string the server actually produces.

import { afterEach, expect, test, vi } from "vitest";

import { mountApp, type AppHandle } from "../src/app";
import compareEdited from "./fixtures/compare_edited.json";
import compareZero from "./fixtures/compare_zero.json";
import evaluateBaseline from "./fixtures/evaluate_baseline.json";
import evaluateEdited from "./fixtures/evaluate_edited.json";
import populationFixture from "./fixtures/population.json";
import presetsFixture from "./fixtures/presets.json";
import whatifFlat from "./fixtures/whatif_family_flat.json";
import whatifNit from "./fixtures/whatif_family_nit.json";

type LoggedCall = { url: string; body: any; signal: AbortSignal | undefined };

function jsonResponse(data: unknown, status = 200): Response {
  return {
    ok: status >= 200 && status < 300,
    status,
    statusText: String(status),
    json: async () => data,
  } as unknown as Response;
}

function topRate(policy: any): number {
  const brackets = policy.schedule.brackets;
  return brackets[brackets.length - 1].rate_bp;
}

function respondTo(url: string, body: any): unknown {
  if (url.endsWith("/api/presets")) return presetsFixture;
  if (url.endsWith("/api/population")) return populationFixture;
  if (url.endsWith("/api/evaluate")) {
    return topRate(body.policy) === 2200 ? evaluateEdited : evaluateBaseline;
  }
  if (url.endsWith("/api/compare")) {
    return topRate(body.policies[1]) === 2200 ? compareEdited : compareZero;
  }
  if (url.endsWith("/api/household/whatif")) {
    const name = typeof body.policy === "string" ? body.policy : body.policy.name;
    return name === "flat_2008" ? whatifFlat : whatifNit;
  }
  throw new Error(`unexpected request ${url}`);
}

function installFetch(calls: LoggedCall[], status?: (url: string, body: any) => number): void {
  vi.stubGlobal(
    "fetch",
    vi.fn(async (input: RequestInfo | URL, init?: RequestInit) => {
      const url = String(input);
      const body = init?.body ? JSON.parse(String(init.body)) : null;
      calls.push({ url, body, signal: init?.signal ?? undefined });
      const code = status?.(url, body) ?? 200;
      if (code !== 200) {
        return jsonResponse(
          { error: { code: "validation", message: "rate_bp must be between 0 and 10000" } },
          code,
        );
      }
      return jsonResponse(respondTo(url, body));
    }),
  );
}

async function mount(
  calls: LoggedCall[],
  status?: (url: string, body: any) => number,
): Promise<{ root: HTMLElement; app: AppHandle }> {
  installFetch(calls, status);
  document.body.innerHTML = '<div id="app"></div>';
  const root = document.querySelector<HTMLElement>("#app")!;
  const app = await mountApp(root);
  await app.whenIdle();
  return { root, app };
}

function text(root: HTMLElement, id: string): string {
  return root.querySelector(`#${id}`)!.textContent ?? "";
}

function commitValue(input: HTMLInputElement, value: string): void {
  input.value = value;
  input.dispatchEvent(new Event("change", { bubbles: true }));
}

function ofUrl(calls: LoggedCall[], suffix: string): LoggedCall[] {
  return calls.filter((c) => c.url.endsWith(suffix));
}

afterEach(() => {
  vi.unstubAllGlobals();
  document.body.innerHTML = "";
});

test("mount pins the baseline and renders its figures verbatim", async () => {
  const calls: LoggedCall[] = [];
  const { root } = await mount(calls);

  expect(ofUrl(calls, "/api/evaluate")).toHaveLength(1);
  expect(ofUrl(calls, "/api/compare")).toHaveLength(1);
  expect(text(root, "population-line")).toContain(populationFixture.population_id);

  expect(text(root, "figure-revenue")).toBe(evaluateBaseline.total_revenue_bgn);
  expect(text(root, "figure-gini-pre")).toBe(evaluateBaseline.gini_pre);
  expect(text(root, "figure-gini-post")).toBe(evaluateBaseline.gini_post);
  expect(text(root, "figure-redistribution")).toBe(evaluateBaseline.redistribution);

  // baseline compared against itself: the deltas rendered are all zero
  const pair = compareZero.against_baseline[0]!;
  expect(text(root, "figure-revenue-delta")).toBe(pair.revenue_delta_bgn);
  expect(text(root, "figure-revenue-delta")).toBe("0.00");
  expect(text(root, "figure-winners")).toBe("0");
  expect(text(root, "figure-losers")).toBe("0");
  expect(text(root, "figure-unchanged")).toBe(String(pair.unchanged));

  expect(root.querySelectorAll("#lorenz-chart path")).toHaveLength(3);
});

test("editing the top bracket rate sends exactly one evaluate and renders the response", async () => {
  const calls: LoggedCall[] = [];
  const { root, app } = await mount(calls);
  const evaluatesBefore = ofUrl(calls, "/api/evaluate").length;

  const rates = root.querySelectorAll<HTMLInputElement>("#bracket-body .rate-input");
  commitValue(rates[rates.length - 1]!, "2200");
  await app.whenIdle();

  const evaluates = ofUrl(calls, "/api/evaluate");
  expect(evaluates).toHaveLength(evaluatesBefore + 1);
  const sent = evaluates[evaluates.length - 1]!.body;
  expect(topRate(sent.policy)).toBe(2200);
  expect(sent.policy.name).toBe("proposed_progressive");
  expect(sent.population_id).toBe(populationFixture.population_id);

  // revenue and post-tax Gini update to the response strings, verbatim
  expect(text(root, "figure-revenue")).toBe(evaluateEdited.total_revenue_bgn);
  expect(text(root, "figure-gini-post")).toBe(evaluateEdited.gini_post);

  // the compare round-trip carries the delta and winner counts
  const compares = ofUrl(calls, "/api/compare");
  expect(compares[compares.length - 1]!.body.policies[0].schedule.brackets).toEqual(
    presetsFixture.presets.find((p) => p.name === "proposed_progressive")!.schedule.brackets,
  );
  const pair = compareEdited.against_baseline[0]!;
  expect(text(root, "figure-revenue-delta")).toBe(pair.revenue_delta_bgn);
  expect(text(root, "figure-losers")).toBe(String(pair.losers));
});

test("an invalid bracket order shows an inline error and sends no request", async () => {
  const calls: LoggedCall[] = [];
  const { root, app } = await mount(calls);
  const before = calls.length;

  const lowers = root.querySelectorAll<HTMLInputElement>("#bracket-body .lower-input");
  commitValue(lowers[2]!, "250");
  await app.whenIdle();

  expect(calls).toHaveLength(before);
  const error = root.querySelector<HTMLElement>("#policy-error")!;
  expect(error.hidden).toBe(false);
  expect(error.textContent).toContain("strictly increasing");
  expect(lowers[2]!.classList.contains("invalid")).toBe(true);

  // fixing the field clears the error and resumes evaluating
  commitValue(lowers[2]!, "1000.00");
  await app.whenIdle();
  expect(error.hidden).toBe(true);
  expect(lowers[2]!.classList.contains("invalid")).toBe(false);
  expect(calls.length).toBeGreaterThan(before);
});

test("the family preset renders the NIT breakdown figures from the whatif response", async () => {
  const calls: LoggedCall[] = [];
  const { root, app } = await mount(calls);

  root.querySelector<HTMLButtonElement>("#family-preset")!.click();
  expect(root.querySelectorAll("#member-body tr")).toHaveLength(5);

  const select = root.querySelector<HTMLSelectElement>("#whatif-policy-select")!;
  expect(select.value).toBe("nit_2016");

  root.querySelector<HTMLButtonElement>("#whatif-run")!.click();
  await app.whenIdle();

  const whatifs = ofUrl(calls, "/api/household/whatif");
  expect(whatifs).toHaveLength(1);
  expect(whatifs[0]!.body.household.members).toHaveLength(5);
  expect(whatifs[0]!.body.household.members[0].monthly_income_bgn).toBe("600.00");
  expect(whatifs[0]!.body.policy).toBe("nit_2016");

  expect(text(root, "whatif-tax")).toBe(whatifNit.tax_bgn);
  expect(text(root, "whatif-tax")).toBe("-300.00");
  expect(text(root, "whatif-transfer")).toBe(whatifNit.nit.transfer_bgn);
  expect(text(root, "whatif-minimum")).toBe(whatifNit.nit.household_minimum_bgn);
  expect(text(root, "whatif-excess")).toBe(whatifNit.nit.taxable_excess_bgn);
  expect(text(root, "whatif-post-tax")).toBe(whatifNit.post_tax_income_bgn);
});

test("the same family under flat_2008 renders the flat-tax figure", async () => {
  const calls: LoggedCall[] = [];
  const { root, app } = await mount(calls);

  root.querySelector<HTMLButtonElement>("#family-preset")!.click();
  const select = root.querySelector<HTMLSelectElement>("#whatif-policy-select")!;
  select.value = "flat_2008";
  root.querySelector<HTMLButtonElement>("#whatif-run")!.click();
  await app.whenIdle();

  expect(text(root, "whatif-tax")).toBe(whatifFlat.tax_bgn);
  expect(text(root, "whatif-tax")).toBe("120.00");
  // per-member lines shown for individual-mode policies
  expect(root.querySelector<HTMLElement>("#whatif-member-table")!.hidden).toBe(false);
  expect(root.querySelectorAll("#whatif-member-body tr")).toHaveLength(whatifFlat.members.length);
  const transferBlock = root.querySelector<HTMLElement>("#whatif-transfer-block")!;
  expect(transferBlock.hidden).toBe(true);
});

test("an empty household disables compute and sends nothing", async () => {
  const calls: LoggedCall[] = [];
  const { root, app } = await mount(calls);
  const run = root.querySelector<HTMLButtonElement>("#whatif-run")!;

  expect(run.disabled).toBe(true);

  root.querySelector<HTMLButtonElement>("#add-member")!.click();
  expect(run.disabled).toBe(false);
  root.querySelector<HTMLButtonElement>("#member-body .remove-member")!.click();
  expect(run.disabled).toBe(true);

  const before = calls.length;
  run.click();
  await app.whenIdle();
  expect(calls).toHaveLength(before);
});

test("an invalid member income shows an inline error and sends nothing", async () => {
  const calls: LoggedCall[] = [];
  const { root, app } = await mount(calls);

  root.querySelector<HTMLButtonElement>("#add-member")!.click();
  const income = root.querySelector<HTMLInputElement>("#member-body .income-input")!;
  income.value = "lots";
  const before = calls.length;
  root.querySelector<HTMLButtonElement>("#whatif-run")!.click();
  await app.whenIdle();

  expect(calls).toHaveLength(before);
  const error = root.querySelector<HTMLElement>("#whatif-error")!;
  expect(error.hidden).toBe(false);
  expect(income.classList.contains("invalid")).toBe(true);
});

test("server-side validation errors surface in the policy error line", async () => {
  const calls: LoggedCall[] = [];
  const { root, app } = await mount(calls, (url, body) => {
    if (url.endsWith("/api/evaluate") && topRate(body.policy) === 9999) return 400;
    if (url.endsWith("/api/compare") && topRate(body.policies[1]) === 9999) return 400;
    return 200;
  });

  const rates = root.querySelectorAll<HTMLInputElement>("#bracket-body .rate-input");
  commitValue(rates[rates.length - 1]!, "9999");
  await app.whenIdle();

  const error = root.querySelector<HTMLElement>("#policy-error")!;
  expect(error.hidden).toBe(false);
  expect(error.textContent).toContain("rate_bp must be between 0 and 10000");
});

test("when responses land out of order the newest edit still wins", async () => {
  const calls: LoggedCall[] = [];
  let defer = false;
  const held: { url: string; body: any; release: () => void }[] = [];

  vi.stubGlobal(
    "fetch",
    vi.fn((input: RequestInfo | URL, init?: RequestInit) => {
      const url = String(input);
      const body = init?.body ? JSON.parse(String(init.body)) : null;
      calls.push({ url, body, signal: init?.signal ?? undefined });
      if (!defer || url.endsWith("/api/presets") || url.endsWith("/api/population")) {
        return Promise.resolve(jsonResponse(respondTo(url, body)));
      }
      return new Promise<Response>((resolve) => {
        held.push({ url, body, release: () => resolve(jsonResponse(respondTo(url, body))) });
      });
    }),
  );

  document.body.innerHTML = '<div id="app"></div>';
  const root = document.querySelector<HTMLElement>("#app")!;
  const app = await mountApp(root);
  await app.whenIdle();

  defer = true;
  const rates = root.querySelectorAll<HTMLInputElement>("#bracket-body .rate-input");
  const top = rates[rates.length - 1]!;
  commitValue(top, "2100");
  commitValue(top, "2200");

  // the first edit's requests were cancelled when the second committed
  const staleEvaluate = calls.find(
    (c) => c.url.endsWith("/api/evaluate") && topRate(c.body.policy) === 2100,
  )!;
  expect(staleEvaluate.signal?.aborted).toBe(true);

  // release the newest responses first; the app renders them
  for (const entry of held.filter((h) => topRate(h.body.policy ?? h.body.policies[1]) === 2200)) {
    entry.release();
  }
  await new Promise((resolve) => setTimeout(resolve, 0));
  expect(text(root, "figure-revenue")).toBe(evaluateEdited.total_revenue_bgn);

  // the stale responses settle afterwards and must not overwrite the render
  for (const entry of held.filter((h) => topRate(h.body.policy ?? h.body.policies[1]) === 2100)) {
    entry.release();
  }
  await new Promise((resolve) => setTimeout(resolve, 0));
  await app.whenIdle();
  expect(text(root, "figure-revenue")).toBe(evaluateEdited.total_revenue_bgn);
});
