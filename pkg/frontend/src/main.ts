// Studio wiring: scenario picker, gamma slider, variant toggles, override
// editors, plan requests, side-by-side playback, and the diff panel.
// All scoring numbers shown come from endpoint responses.

import { EndpointError, StaleResponse, StudioClient, type PlanResult } from './api';
import { parseParamValue, validateOverrides, type OverrideIssue } from './catalog';
import { diffMetrics, formatSigned } from './diff';
import { PlaybackClock, frameIndex } from './playback';
import { PlaybackView } from './render';
import type {
  Catalog,
  MetricsDoc,
  Override,
  PlanMode,
  PlanRequest,
  ScenarioDescriptor,
  SearchMode,
  Variant,
} from './types';

// ------------------------------------------------------------------ DOM refs

const $scenario = document.getElementById('scenario-select') as HTMLSelectElement;
const $description = document.getElementById('scenario-description') as HTMLParagraphElement;
const $gamma = document.getElementById('gamma-slider') as HTMLInputElement;
const $gammaValue = document.getElementById('gamma-value') as HTMLSpanElement;
const $seed = document.getElementById('seed-input') as HTMLInputElement;
const $mode = document.getElementById('mode-select') as HTMLSelectElement;
const $search = document.getElementById('search-select') as HTMLSelectElement;
const $searchRow = document.getElementById('search-row') as HTMLDivElement;
const $variantF = document.getElementById('variant-f') as HTMLButtonElement;
const $variantE = document.getElementById('variant-e') as HTMLButtonElement;
const $overrides = document.getElementById('overrides-panel') as HTMLDivElement;
const $overridesRow = document.getElementById('overrides-row') as HTMLDivElement;
const $plan = document.getElementById('plan-button') as HTMLButtonElement;
const $error = document.getElementById('error-banner') as HTMLDivElement;
const $status = document.getElementById('status-line') as HTMLDivElement;
const $panelF = document.getElementById('panel-f') as HTMLDivElement;
const $panelE = document.getElementById('panel-e') as HTMLDivElement;
const $metricsF = document.getElementById('metrics-f') as HTMLDivElement;
const $metricsE = document.getElementById('metrics-e') as HTMLDivElement;
const $scrubber = document.getElementById('scrubber') as HTMLInputElement;
const $play = document.getElementById('play-button') as HTMLButtonElement;
const $timeLabel = document.getElementById('time-label') as HTMLSpanElement;
const $diff = document.getElementById('diff-panel') as HTMLDivElement;
const $request = document.getElementById('request-panel') as HTMLPreElement;
const $cliLine = document.getElementById('cli-line') as HTMLElement;
const $copyRequest = document.getElementById('copy-request') as HTMLButtonElement;
const $annotations = document.getElementById('annotations-list') as HTMLUListElement;

const viewF = new PlaybackView(
  document.getElementById('canvas-f') as HTMLCanvasElement,
  '#7dd3a7',
);
const viewE = new PlaybackView(
  document.getElementById('canvas-e') as HTMLCanvasElement,
  '#f0b455',
);

// ------------------------------------------------------------------ Session state

const client = new StudioClient('');
const clock = new PlaybackClock();

let scenarios: ScenarioDescriptor[] = [];
let catalog: Catalog | null = null;
let variantOn: Record<Variant, boolean> = { F: true, E: true };
let fetched: Partial<Record<Variant, PlanResult>> = {};
let previousMetrics: Partial<Record<Variant, MetricsDoc>> = {};
let inFlight = false;
let lastTick: number | null = null;

function selectedScenario(): ScenarioDescriptor | undefined {
  return scenarios.find((s) => s.id === $scenario.value);
}

// ------------------------------------------------------------------ Overrides editor

interface ParamField {
  index: number;
  name: string;
  input: HTMLInputElement;
  original: number | string;
}

let paramFields: ParamField[] = [];

function renderOverrideEditor(): void {
  const scenario = selectedScenario();
  $overrides.innerHTML = '';
  paramFields = [];
  const scripted = $mode.value === 'scripted';
  $overridesRow.style.display = scripted ? '' : 'none';
  if (!scripted || scenario === undefined || catalog === null) {
    return;
  }
  if (scenario.scripted_plan.length === 0) {
    $overrides.textContent = 'no scripted steps for this scenario';
    return;
  }
  scenario.scripted_plan.forEach((step, index) => {
    const box = document.createElement('div');
    box.className = 'override-step';
    const title = document.createElement('div');
    title.className = 'override-title';
    title.textContent = `${index}. ${step.kind} @ ${step.anchor}`;
    box.appendChild(title);
    const schemas = catalog!.kinds[step.kind] ?? {};
    for (const [name, value] of Object.entries(step.params)) {
      const row = document.createElement('label');
      row.className = 'override-param';
      const schema = schemas[name];
      const bounds =
        schema !== undefined && schema.low !== null && schema.high !== null
          ? ` [${schema.low}..${schema.high}]`
          : '';
      const caption = document.createElement('span');
      caption.textContent = `${name}${bounds}`;
      const input = document.createElement('input');
      input.type = 'text';
      input.value = String(value);
      input.addEventListener('input', () => {
        input.classList.remove('invalid');
        clearError();
      });
      row.appendChild(caption);
      row.appendChild(input);
      box.appendChild(row);
      paramFields.push({ index, name, input, original: value });
    }
    $overrides.appendChild(box);
  });
}

/** Collect touched fields into overrides, or report the first parse failure. */
function collectOverrides(): { overrides: Override[] } | { error: string } {
  const scenario = selectedScenario();
  if (scenario === undefined || catalog === null) {
    return { overrides: [] };
  }
  const byIndex = new Map<number, Record<string, number | string>>();
  for (const field of paramFields) {
    const step = scenario.scripted_plan[field.index];
    if (step === undefined) {
      continue;
    }
    const schema = catalog.kinds[step.kind]?.[field.name];
    if (schema === undefined) {
      continue;
    }
    const parsed = parseParamValue(schema, field.input.value);
    if ('error' in parsed) {
      field.input.classList.add('invalid');
      return { error: `step ${field.index} ${field.name}: ${parsed.error}` };
    }
    if (parsed.value !== field.original) {
      const params = byIndex.get(field.index) ?? {};
      params[field.name] = parsed.value;
      byIndex.set(field.index, params);
    }
  }
  const overrides = Array.from(byIndex.entries())
    .sort(([a], [b]) => a - b)
    .map(([index, params]) => ({ index, params }));
  return { overrides };
}

function markIssues(issues: OverrideIssue[]): void {
  for (const issue of issues) {
    for (const field of paramFields) {
      if (field.index === issue.index && field.name === issue.param) {
        field.input.classList.add('invalid');
      }
    }
  }
}

// ------------------------------------------------------------------ Requests

function buildRequest(variant: Variant, overrides: Override[]): PlanRequest {
  return {
    scenario: $scenario.value,
    variant,
    gamma: Number($gamma.value),
    seed: Math.trunc(Number($seed.value) || 0),
    mode: $mode.value as PlanMode,
    search: $search.value as SearchMode,
    overrides,
  };
}

function cliCommand(request: PlanRequest): string {
  return [
    'lampbot plan',
    `--scenario ${request.scenario}`,
    `--variant ${request.variant}`,
    `--gamma ${request.gamma}`,
    `--seed ${request.seed}`,
    `--mode ${request.mode}`,
    `--search ${request.search}`,
    '--out plan.json',
  ].join(' ');
}

async function submitPlan(): Promise<void> {
  const scenario = selectedScenario();
  if (scenario === undefined || catalog === null || inFlight) {
    return;
  }
  clearError();
  const collected = collectOverrides();
  if ('error' in collected) {
    showError('invalid_override', collected.error);
    return;
  }
  const issues = validateOverrides(catalog, scenario.scripted_plan, collected.overrides);
  if (issues.length > 0) {
    markIssues(issues);
    showError('invalid_override', issues.map((i) => i.message).join('; '));
    return;
  }
  const variants = (['F', 'E'] as Variant[]).filter((v) => variantOn[v]);
  if (variants.length === 0) {
    showError('no_variant', 'enable at least one variant');
    return;
  }

  inFlight = true;
  $plan.disabled = true;
  $plan.textContent = 'planning…';
  try {
    for (const variant of variants) {
      const request = buildRequest(variant, collected.overrides);
      const started = performance.now();
      const result = await client.plan(request);
      const elapsed = performance.now() - started;
      const prior = fetched[variant];
      if (prior !== undefined && prior.requestDigest !== result.requestDigest) {
        previousMetrics[variant] = prior.response.metrics;
      }
      fetched[variant] = result;
      $status.textContent = result.fromCache
        ? `cache hit ${result.requestDigest.slice(0, 12)} (no request sent)`
        : `planned in ${elapsed.toFixed(0)} ms, server ${result.response.metrics.timing_ms.toFixed(0)} ms, digest ${result.response.digest.slice(0, 12)}`;
      showRequest(request);
    }
    refreshPanels();
  } catch (err) {
    if (err instanceof StaleResponse) {
      return; // superseded by a newer request; its handler updates the UI
    }
    if (err instanceof EndpointError) {
      showError(err.code, err.message);
    } else {
      showError('network', String(err));
    }
  } finally {
    inFlight = false;
    $plan.disabled = false;
    $plan.textContent = 'Plan';
  }
}

// ------------------------------------------------------------------ Panels

function metricsLine(metrics: MetricsDoc): string {
  const flags = metrics.goal_reached ? '' : ' · goal out of reach';
  return (
    `F ${metrics.report.F.toFixed(0)} · E ${metrics.report.E.toFixed(3)} · ` +
    `total ${metrics.report.total.toFixed(3)} · ${metrics.duration.toFixed(2)} s${flags}`
  );
}

function refreshPanels(): void {
  $panelF.style.display = variantOn.F ? '' : 'none';
  $panelE.style.display = variantOn.E ? '' : 'none';

  const fResult = variantOn.F ? fetched.F : undefined;
  const eResult = variantOn.E ? fetched.E : undefined;
  const scenario = selectedScenario();

  if (fResult !== undefined && scenario !== undefined) {
    viewF.setTrajectory(fResult.response.render, scenario.world);
    $metricsF.textContent = metricsLine(fResult.response.metrics);
  } else {
    viewF.clear('no F plan fetched');
    $metricsF.textContent = '';
  }
  if (eResult !== undefined && scenario !== undefined) {
    viewE.setTrajectory(eResult.response.render, scenario.world);
    $metricsE.textContent = metricsLine(eResult.response.metrics);
  } else {
    viewE.clear('no E plan fetched');
    $metricsE.textContent = '';
  }

  const durations = [fResult, eResult]
    .filter((r): r is PlanResult => r !== undefined)
    .map((r) => r.response.metrics.duration);
  clock.setDuration(durations.length > 0 ? Math.max(...durations) : 0);
  $scrubber.max = String(clock.duration);
  renderDiff();
  renderAnnotations();
  drawFrames();
}

function renderDiff(): void {
  const rows: string[] = [];
  const fNow = fetched.F?.response.metrics;
  const eNow = fetched.E?.response.metrics;
  if (fNow !== undefined && eNow !== undefined) {
    const d = diffMetrics(fNow, eNow);
    rows.push(
      `<tr><th>E − F</th><td>${formatSigned(d.dF, 0)}</td><td>${formatSigned(d.dE)}</td>` +
        `<td>${formatSigned(d.dTotal)}</td><td>${formatSigned(d.dDuration, 2)} s</td></tr>`,
    );
  }
  for (const variant of ['F', 'E'] as Variant[]) {
    const now = fetched[variant]?.response.metrics;
    const before = previousMetrics[variant];
    if (now !== undefined && before !== undefined) {
      const d = diffMetrics(before, now);
      rows.push(
        `<tr><th>${variant} vs previous</th><td>${formatSigned(d.dF, 0)}</td><td>${formatSigned(d.dE)}</td>` +
          `<td>${formatSigned(d.dTotal)}</td><td>${formatSigned(d.dDuration, 2)} s</td></tr>`,
      );
    }
  }
  $diff.innerHTML =
    rows.length === 0
      ? '<p class="muted">plan both variants to compare</p>'
      : `<table><thead><tr><th></th><th>ΔF</th><th>ΔE</th><th>Δtotal</th><th>Δduration</th></tr></thead>` +
        `<tbody>${rows.join('')}</tbody></table>`;
}

function renderAnnotations(): void {
  $annotations.innerHTML = '';
  const source = fetched.E ?? fetched.F;
  if (source === undefined) {
    return;
  }
  for (const note of source.response.render.annotations) {
    const item = document.createElement('li');
    item.dataset['start'] = String(note.start);
    item.dataset['end'] = String(note.end);
    item.textContent = `${note.label} · ${note.start.toFixed(2)}–${note.end.toFixed(2)} s`;
    $annotations.appendChild(item);
  }
}

function showRequest(request: PlanRequest): void {
  $request.textContent = JSON.stringify(request, null, 2);
  $cliLine.textContent = cliCommand(request);
}

function showError(code: string, message: string): void {
  $error.style.display = '';
  $error.textContent = `${code}: ${message}`;
}

function clearError(): void {
  $error.style.display = 'none';
  $error.textContent = '';
}

// ------------------------------------------------------------------ Playback

function drawFrames(): void {
  const t = clock.time;
  $scrubber.value = String(t);
  $timeLabel.textContent = `${t.toFixed(2)} / ${clock.duration.toFixed(2)} s`;
  const fResult = variantOn.F ? fetched.F : undefined;
  const eResult = variantOn.E ? fetched.E : undefined;
  if (fResult !== undefined) {
    viewF.drawFrame(frameIndex(fResult.response.render.times, t));
  }
  if (eResult !== undefined) {
    viewE.drawFrame(frameIndex(eResult.response.render.times, t));
  }
  for (const item of Array.from($annotations.children)) {
    const el = item as HTMLElement;
    const start = Number(el.dataset['start']);
    const end = Number(el.dataset['end']);
    el.classList.toggle('active', t >= start && t <= end);
  }
}

function tick(now: number): void {
  if (clock.playing) {
    if (lastTick !== null) {
      clock.advance((now - lastTick) / 1000);
    }
    drawFrames();
  }
  lastTick = now;
  requestAnimationFrame(tick);
}

// ------------------------------------------------------------------ Wiring

function setVariant(variant: Variant, on: boolean): void {
  variantOn = { ...variantOn, [variant]: on };
  $variantF.classList.toggle('on', variantOn.F);
  $variantE.classList.toggle('on', variantOn.E);
  refreshPanels();
}

function onScenarioChange(): void {
  const scenario = selectedScenario();
  $description.textContent = scenario?.description ?? '';
  fetched = {};
  previousMetrics = {};
  renderOverrideEditor();
  refreshPanels();
}

async function boot(): Promise<void> {
  try {
    [scenarios, catalog] = await Promise.all([client.scenarios(), client.catalog()]);
  } catch (err) {
    showError('endpoint_unreachable', `is lampbot serve running? ${String(err)}`);
    return;
  }
  $scenario.innerHTML = '';
  for (const scenario of scenarios) {
    const option = document.createElement('option');
    option.value = scenario.id;
    option.textContent = `${scenario.title} (${scenario.orientation}/${scenario.agency})`;
    $scenario.appendChild(option);
  }

  $scenario.addEventListener('change', onScenarioChange);
  $gamma.addEventListener('input', () => {
    $gammaValue.textContent = Number($gamma.value).toFixed(2);
  });
  $mode.addEventListener('change', () => {
    $searchRow.style.display = $mode.value === 'searched' ? '' : 'none';
    renderOverrideEditor();
  });
  $variantF.addEventListener('click', () => setVariant('F', !variantOn.F));
  $variantE.addEventListener('click', () => setVariant('E', !variantOn.E));
  $plan.addEventListener('click', () => void submitPlan());
  $scrubber.addEventListener('input', () => {
    clock.seek(Number($scrubber.value));
    drawFrames();
  });
  $play.addEventListener('click', () => {
    clock.playing = !clock.playing;
    $play.textContent = clock.playing ? 'Pause' : 'Play';
  });
  $copyRequest.addEventListener('click', () => {
    void navigator.clipboard.writeText(`${$request.textContent}\n${$cliLine.textContent}`);
  });

  $gammaValue.textContent = Number($gamma.value).toFixed(2);
  $searchRow.style.display = 'none';
  onScenarioChange();
  requestAnimationFrame(tick);
}

void boot();
