// Single-page what-if explorer. The page keeps one editable policy draft
// pinned against a baseline preset; every committed edit round-trips through
// /api/evaluate and /api/compare, and every figure on screen is the verbatim
// string from one API response field. The client validates drafts before
// sending but computes no tax or metric figures itself.

import {
  ApiError,
  createClient,
  type BaselinePair,
  type BreakdownRecord,
  type Client,
  type ComparisonRecord,
  type MemberBreakdown,
  type MemberRecord,
  type PolicyRecord,
  type PopulationSummary,
  type ReportRecord,
} from "./api";
import {
  draftFromPolicy,
  isMoneyText,
  policyFromDraft,
  validateDraft,
  type DraftIssue,
  type PolicyDraft,
} from "./draft";
import { renderLorenz } from "./lorenz";

const DRAFT_OPTION = "__draft__";

const TEMPLATE = `
<header>
  <h1>taxlab explorer</h1>
  <p id="population-line">loading population...</p>
</header>
<main>
  <section class="card" id="editor-card">
    <h2>Policy editor</h2>
    <div class="field-row">
      <label>preset <select id="preset-select"></select></label>
      <label>name <input id="name-input" size="18"></label>
    </div>
    <div class="field-row">
      <label>mode
        <select id="mode-select">
          <option value="slab">slab</option>
          <option value="marginal">marginal</option>
        </select>
      </label>
      <label>period
        <select id="period-select">
          <option value="monthly">monthly</option>
          <option value="annual">annual</option>
        </select>
      </label>
      <label>household
        <select id="household-mode-select">
          <option value="individual">individual</option>
          <option value="per_member">per_member</option>
          <option value="nit">nit</option>
        </select>
      </label>
      <label>pooled <input type="checkbox" id="pooled-input"></label>
    </div>
    <div class="field-row">
      <label>social minimum (BGN/person) <input id="social-minimum-input" size="8"></label>
      <label>collection rate (bp) <input id="collection-rate-input" size="6"></label>
    </div>
    <table id="bracket-table">
      <thead><tr><th>from (BGN)</th><th>rate (bp)</th><th></th></tr></thead>
      <tbody id="bracket-body"></tbody>
    </table>
    <button type="button" id="add-bracket">add bracket</button>
    <div class="field-row" id="relief-row" hidden>
      <label>child relief 1/2/3+ (BGN)
        <input id="relief-child-1" size="7">
        <input id="relief-child-2" size="7">
        <input id="relief-child-3" size="7">
      </label>
      <label>donation cap (bp) <input id="relief-donation-cap" size="6"></label>
    </div>
    <p class="error" id="policy-error" hidden></p>
  </section>

  <section class="card" id="results-card">
    <h2>Results</h2>
    <p class="status" id="eval-status"></p>
    <dl class="figures">
      <div><dt>revenue (BGN)</dt><dd id="figure-revenue"></dd></div>
      <div><dt>vs baseline (BGN)</dt><dd id="figure-revenue-delta"></dd></div>
      <div><dt>winners</dt><dd id="figure-winners"></dd></div>
      <div><dt>losers</dt><dd id="figure-losers"></dd></div>
      <div><dt>unchanged</dt><dd id="figure-unchanged"></dd></div>
      <div><dt>Gini pre-tax</dt><dd id="figure-gini-pre"></dd></div>
      <div><dt>Gini post-tax</dt><dd id="figure-gini-post"></dd></div>
      <div><dt>redistribution</dt><dd id="figure-redistribution"></dd></div>
    </dl>
    <svg id="lorenz-chart" role="img" aria-label="Lorenz curves"></svg>
    <p class="legend">diagonal: equality / thin: pre-tax / thick: post-tax</p>
  </section>

  <section class="card" id="whatif-card">
    <h2>Household what-if</h2>
    <div class="field-row">
      <label>policy <select id="whatif-policy-select"></select></label>
      <button type="button" id="family-preset">2 adults + 3 children, 1200 BGN</button>
    </div>
    <table id="member-table">
      <thead><tr><th>role</th><th>income (BGN/month)</th><th></th></tr></thead>
      <tbody id="member-body"></tbody>
    </table>
    <button type="button" id="add-member">add member</button>
    <button type="button" id="whatif-run" disabled>compute</button>
    <p class="error" id="whatif-error" hidden></p>
    <dl class="figures" id="whatif-figures" hidden>
      <div><dt>monthly tax (BGN)</dt><dd id="whatif-tax"></dd></div>
      <div><dt>post-tax income (BGN)</dt><dd id="whatif-post-tax"></dd></div>
      <div id="whatif-transfer-block" hidden>
        <dt>NIT transfer (BGN)</dt><dd id="whatif-transfer"></dd>
        <dt>household minimum (BGN)</dt><dd id="whatif-minimum"></dd>
        <dt>taxable excess (BGN)</dt><dd id="whatif-excess"></dd>
      </div>
    </dl>
    <table id="whatif-member-table" hidden>
      <thead><tr><th>member</th><th>income (BGN)</th><th>tax (BGN)</th></tr></thead>
      <tbody id="whatif-member-body"></tbody>
    </table>
  </section>
</main>
`;

export type AppOptions = {
  client?: Client;
  synthesis?: Record<string, number | boolean>;
  baselinePreset?: string;
};

export type AppHandle = { whenIdle: () => Promise<void> };

function escapeHtml(text: string): string {
  const table: Record<string, string> = {
    "&": "&amp;",
    "<": "&lt;",
    ">": "&gt;",
    '"': "&quot;",
    "'": "&#39;",
  };
  return text.replace(/[&<>"']/g, (c) => table[c] ?? c);
}

function isAbort(err: unknown): boolean {
  return err instanceof Error && err.name === "AbortError";
}

export async function mountApp(root: HTMLElement, options: AppOptions = {}): Promise<AppHandle> {
  const client = options.client ?? createClient();
  root.innerHTML = TEMPLATE;

  const el = <T extends HTMLElement = HTMLElement>(id: string): T => {
    const found = root.querySelector<T>(`#${id}`);
    if (!found) throw new Error(`missing element #${id}`);
    return found;
  };

  const editorCard = el("editor-card");
  const whatifCard = el("whatif-card");
  const presetSelect = el<HTMLSelectElement>("preset-select");
  const nameInput = el<HTMLInputElement>("name-input");
  const modeSelect = el<HTMLSelectElement>("mode-select");
  const periodSelect = el<HTMLSelectElement>("period-select");
  const householdModeSelect = el<HTMLSelectElement>("household-mode-select");
  const pooledInput = el<HTMLInputElement>("pooled-input");
  const socialMinimumInput = el<HTMLInputElement>("social-minimum-input");
  const collectionRateInput = el<HTMLInputElement>("collection-rate-input");
  const bracketBody = el("bracket-body");
  const reliefRow = el("relief-row");
  const reliefChildInputs = [
    el<HTMLInputElement>("relief-child-1"),
    el<HTMLInputElement>("relief-child-2"),
    el<HTMLInputElement>("relief-child-3"),
  ];
  const reliefDonationCapInput = el<HTMLInputElement>("relief-donation-cap");
  const policyError = el("policy-error");
  const evalStatus = el("eval-status");
  const lorenzSvg = root.querySelector<SVGElement>("#lorenz-chart");
  const whatifPolicySelect = el<HTMLSelectElement>("whatif-policy-select");
  const memberBody = el("member-body");
  const whatifRun = el<HTMLButtonElement>("whatif-run");
  const whatifError = el("whatif-error");
  const whatifFigures = el("whatif-figures");
  const whatifTransferBlock = el("whatif-transfer-block");
  const whatifMemberTable = el("whatif-member-table");
  const whatifMemberBody = el("whatif-member-body");

  // ---- in-flight bookkeeping ------------------------------------------
  const pending = new Set<Promise<void>>();
  const track = (work: Promise<void>): void => {
    pending.add(work);
    const drop = () => pending.delete(work);
    work.then(drop, drop);
  };
  const whenIdle = async (): Promise<void> => {
    while (pending.size > 0) {
      await Promise.allSettled([...pending]);
    }
  };

  // ---- state -----------------------------------------------------------
  let presets: PolicyRecord[] = [];
  let populationId = "";
  let baseline!: PolicyRecord;
  let draft!: PolicyDraft;
  let evalSeq = 0;
  let evalController: AbortController | null = null;
  let whatifSeq = 0;
  let whatifController: AbortController | null = null;

  // ---- rendering -------------------------------------------------------
  function setStatus(text: string): void {
    evalStatus.textContent = text;
  }

  function setPolicyError(message: string | null): void {
    policyError.hidden = message === null;
    policyError.textContent = message ?? "";
  }

  function setWhatifError(message: string | null): void {
    whatifError.hidden = message === null;
    whatifError.textContent = message ?? "";
  }

  function renderPopulation(population: PopulationSummary): void {
    el("population-line").textContent =
      `population ${population.population_id}: ${population.households} households, ` +
      `${population.persons} persons, income ${population.total_income_bgn} BGN/month`;
  }

  function renderReport(report: ReportRecord): void {
    el("figure-revenue").textContent = report.total_revenue_bgn;
    el("figure-gini-pre").textContent = report.gini_pre ?? "n/a";
    el("figure-gini-post").textContent = report.gini_post ?? "n/a";
    el("figure-redistribution").textContent = report.redistribution ?? "n/a";
    if (lorenzSvg) renderLorenz(lorenzSvg, report.lorenz_pre, report.lorenz_post);
  }

  function renderComparison(comparison: ComparisonRecord): void {
    const pair: BaselinePair | undefined = comparison.against_baseline[0];
    if (!pair) return;
    el("figure-revenue-delta").textContent = pair.revenue_delta_bgn;
    el("figure-winners").textContent = String(pair.winners);
    el("figure-losers").textContent = String(pair.losers);
    el("figure-unchanged").textContent = String(pair.unchanged);
  }

  function renderBrackets(): void {
    bracketBody.replaceChildren(
      ...draft.brackets.map((bracket, i) => {
        const row = document.createElement("tr");
        row.innerHTML =
          `<td><input class="lower-input" value="${escapeHtml(bracket.lower)}" size="9"></td>` +
          `<td><input class="rate-input" value="${escapeHtml(bracket.rate)}" size="6"></td>` +
          `<td><button type="button" class="remove-bracket" data-index="${i}">remove</button></td>`;
        return row;
      }),
    );
  }

  function renderReliefInputs(): void {
    reliefRow.hidden = draft.reliefChild === null;
    if (draft.reliefChild) {
      reliefChildInputs.forEach((input, i) => {
        input.value = draft.reliefChild?.[i] ?? "";
      });
      reliefDonationCapInput.value = draft.reliefDonationCap ?? "";
    }
  }

  function renderEditor(): void {
    presetSelect.value = baseline.name;
    nameInput.value = draft.name;
    modeSelect.value = draft.mode;
    periodSelect.value = draft.period;
    householdModeSelect.value = draft.householdMode;
    pooledInput.checked = draft.pooled;
    socialMinimumInput.value = draft.socialMinimum;
    collectionRateInput.value = draft.collectionRate;
    renderBrackets();
    renderReliefInputs();
  }

  function renderIssues(issues: DraftIssue[]): void {
    for (const field of editorCard.querySelectorAll("input, select")) {
      field.classList.remove("invalid");
    }
    if (issues.length === 0) {
      setPolicyError(null);
      return;
    }
    for (const issue of issues) markIssue(issue);
    setPolicyError(issues.map((i) => i.message).join("; "));
  }

  function markIssue(issue: DraftIssue): void {
    if (issue.field === "lower" || issue.field === "rate") {
      const selector = issue.field === "lower" ? ".lower-input" : ".rate-input";
      bracketBody.querySelectorAll(selector)[issue.index ?? 0]?.classList.add("invalid");
      return;
    }
    if (issue.field === "relief_child") {
      reliefChildInputs[issue.index ?? 0]?.classList.add("invalid");
      return;
    }
    const byField: Record<string, Element> = {
      name: nameInput,
      mode: modeSelect,
      period: periodSelect,
      household_mode: householdModeSelect,
      pooled: pooledInput,
      social_minimum: socialMinimumInput,
      collection_rate: collectionRateInput,
      relief_donation_cap: reliefDonationCapInput,
    };
    byField[issue.field]?.classList.add("invalid");
  }

  // ---- draft lifecycle ---------------------------------------------------
  function readDraft(): void {
    draft.name = nameInput.value;
    draft.mode = modeSelect.value;
    draft.period = periodSelect.value;
    draft.householdMode = householdModeSelect.value;
    draft.pooled = pooledInput.checked;
    draft.socialMinimum = socialMinimumInput.value.trim();
    draft.collectionRate = collectionRateInput.value.trim();
    const lowers = bracketBody.querySelectorAll<HTMLInputElement>(".lower-input");
    const rates = bracketBody.querySelectorAll<HTMLInputElement>(".rate-input");
    draft.brackets = [...lowers].map((input, i) => ({
      lower: input.value.trim(),
      rate: (rates[i]?.value ?? "").trim(),
    }));
    if (draft.reliefChild) {
      draft.reliefChild = [
        reliefChildInputs[0]?.value.trim() ?? "",
        reliefChildInputs[1]?.value.trim() ?? "",
        reliefChildInputs[2]?.value.trim() ?? "",
      ];
      draft.reliefDonationCap = reliefDonationCapInput.value.trim();
    }
  }

  function commit(): void {
    readDraft();
    draft.dirty = true;
    const issues = validateDraft(draft);
    renderIssues(issues);
    if (issues.length > 0) {
      // An invalid draft supersedes whatever evaluation is still in flight:
      // its result would describe a policy the editor no longer shows.
      evalSeq += 1;
      evalController?.abort();
      setStatus("");
      return;
    }
    runEvaluation(policyFromDraft(draft));
  }

  function runEvaluation(policy: PolicyRecord): void {
    evalController?.abort();
    const controller = new AbortController();
    evalController = controller;
    const seq = ++evalSeq;
    setStatus("evaluating...");
    track(
      (async () => {
        try {
          const [report, comparison] = await Promise.all([
            client.evaluate(populationId, policy, controller.signal),
            client.compare(populationId, [baseline, policy], controller.signal),
          ]);
          if (seq !== evalSeq) return;
          renderReport(report);
          renderComparison(comparison);
          setPolicyError(null);
          setStatus("");
        } catch (err) {
          if (seq !== evalSeq || isAbort(err)) return;
          setPolicyError(err instanceof ApiError ? err.message : String(err));
          setStatus("");
        }
      })(),
    );
  }

  function loadPreset(name: string): void {
    const record = presets.find((p) => p.name === name);
    if (!record) return;
    baseline = record;
    draft = draftFromPolicy(record);
    renderEditor();
    renderIssues([]);
    runEvaluation(policyFromDraft(draft));
  }

  // ---- household what-if -------------------------------------------------
  function memberRow(role: string, income: string): HTMLTableRowElement {
    const row = document.createElement("tr");
    row.innerHTML =
      `<td><select class="role-select">` +
      `<option value="adult"${role === "adult" ? " selected" : ""}>adult</option>` +
      `<option value="child"${role === "child" ? " selected" : ""}>child</option>` +
      `</select></td>` +
      `<td><input class="income-input" value="${escapeHtml(income)}" size="9"></td>` +
      `<td><button type="button" class="remove-member">remove</button></td>`;
    return row;
  }

  function updateWhatifButton(): void {
    whatifRun.disabled = memberBody.querySelectorAll("tr").length === 0;
  }

  function renderBreakdown(breakdown: BreakdownRecord): void {
    whatifFigures.hidden = false;
    el("whatif-tax").textContent = breakdown.tax_bgn;
    el("whatif-post-tax").textContent = breakdown.post_tax_income_bgn;
    if (breakdown.nit) {
      whatifTransferBlock.hidden = false;
      el("whatif-transfer").textContent = breakdown.nit.transfer_bgn;
      el("whatif-minimum").textContent = breakdown.nit.household_minimum_bgn;
      el("whatif-excess").textContent = breakdown.nit.taxable_excess_bgn;
    } else {
      whatifTransferBlock.hidden = true;
    }
    renderMemberBreakdown(breakdown.members);
  }

  function renderMemberBreakdown(members: MemberBreakdown[]): void {
    whatifMemberTable.hidden = members.length === 0;
    whatifMemberBody.replaceChildren(
      ...members.map((m) => {
        const row = document.createElement("tr");
        for (const text of [m.member_id, m.monthly_income_bgn, m.monthly_tax_bgn]) {
          const cell = document.createElement("td");
          cell.textContent = text;
          row.append(cell);
        }
        return row;
      }),
    );
  }

  function runWhatif(): void {
    const rows = [...memberBody.querySelectorAll("tr")];
    if (rows.length === 0) return;
    const members: MemberRecord[] = [];
    const problems: string[] = [];
    rows.forEach((row, i) => {
      const role = row.querySelector<HTMLSelectElement>(".role-select");
      const input = row.querySelector<HTMLInputElement>(".income-input");
      if (!role || !input) return;
      input.classList.remove("invalid");
      const income = input.value.trim();
      if (!isMoneyText(income)) {
        problems.push(`member ${i + 1}: income must be a BGN amount like 600 or 600.00`);
        input.classList.add("invalid");
        return;
      }
      members.push({ role: role.value as MemberRecord["role"], monthly_income_bgn: income });
    });
    if (problems.length > 0) {
      setWhatifError(problems.join("; "));
      return;
    }
    let policy: PolicyRecord | string = whatifPolicySelect.value;
    if (policy === DRAFT_OPTION) {
      readDraft();
      if (validateDraft(draft).length > 0) {
        setWhatifError("fix the policy draft before using it here");
        return;
      }
      policy = policyFromDraft(draft);
    }
    setWhatifError(null);
    whatifController?.abort();
    const controller = new AbortController();
    whatifController = controller;
    const seq = ++whatifSeq;
    track(
      (async () => {
        try {
          const breakdown = await client.whatif({ members }, policy, controller.signal);
          if (seq !== whatifSeq) return;
          renderBreakdown(breakdown);
        } catch (err) {
          if (seq !== whatifSeq || isAbort(err)) return;
          setWhatifError(err instanceof ApiError ? err.message : String(err));
        }
      })(),
    );
  }

  // ---- wiring --------------------------------------------------------------
  function fillSelect(select: HTMLSelectElement, values: [string, string][]): void {
    select.replaceChildren(
      ...values.map(([value, label]) => {
        const option = document.createElement("option");
        option.value = value;
        option.textContent = label;
        return option;
      }),
    );
  }

  editorCard.addEventListener("change", (event) => {
    if (event.target === presetSelect) {
      loadPreset(presetSelect.value);
      return;
    }
    commit();
  });

  editorCard.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.id === "add-bracket") {
      readDraft();
      draft.brackets.push({ lower: "", rate: "" });
      draft.dirty = true;
      renderBrackets();
      return;
    }
    if (target.classList.contains("remove-bracket")) {
      readDraft();
      draft.brackets.splice(Number(target.getAttribute("data-index")), 1);
      renderBrackets();
      commit();
    }
  });

  whatifCard.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.id === "add-member") {
      memberBody.append(memberRow("adult", ""));
      updateWhatifButton();
    } else if (target.id === "family-preset") {
      memberBody.replaceChildren(
        memberRow("adult", "600.00"),
        memberRow("adult", "600.00"),
        memberRow("child", "0.00"),
        memberRow("child", "0.00"),
        memberRow("child", "0.00"),
      );
      updateWhatifButton();
    } else if (target.classList.contains("remove-member")) {
      target.closest("tr")?.remove();
      updateWhatifButton();
    } else if (target.id === "whatif-run") {
      runWhatif();
    }
  });

  // ---- bootstrap -------------------------------------------------------------
  const [presetResponse, population] = await Promise.all([
    client.presets(),
    client.createPopulation(options.synthesis ?? { seed: 7, household_count: 300 }),
  ]);
  presets = presetResponse.presets;
  populationId = population.population_id;
  renderPopulation(population);
  fillSelect(presetSelect, presets.map((p) => [p.name, p.name]));
  fillSelect(whatifPolicySelect, [
    ...presets.map((p): [string, string] => [p.name, p.name]),
    [DRAFT_OPTION, "current draft"],
  ]);
  if (presets.some((p) => p.name === "nit_2016")) {
    whatifPolicySelect.value = "nit_2016";
  }
  const fallback = presets.some((p) => p.name === "proposed_progressive")
    ? "proposed_progressive"
    : (presets[0]?.name ?? "");
  loadPreset(options.baselinePreset ?? fallback);
  return { whenIdle };
}
