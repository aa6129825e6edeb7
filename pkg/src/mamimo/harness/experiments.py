"""Experiment registry: one entry per figure plus power control and a generic
closed-form sweep.

Each experiment ships reference default parameters (so running it bare is
the reproduction command), declares its output schema, and is implemented as
a list of independent work units so the runner can thread it without
affecting results.
"""

import numpy as np

from .. import capacity, linklevel, linproc, multicell, powerctl, syscost
from ..channel import (
    SCENARIO_IID_RAYLEIGH,
    SCENARIO_LOS_ULA,
    ArrayGeometry,
    draw_iid_rayleigh,
    draw_los_ula,
    los_steering,
)
from ..errors import InfeasibleError
from ..estimation import csi_quality
from ..ldpc import backend_name, make_regular_code
from ..seeding import spawn_rng
from .runner import run_units

_TRIAL_BATCH = 250  # fixed batching keeps aggregation independent of threads


def _int_list(s) -> list[int]:
    if isinstance(s, (list, tuple)):
        return [int(v) for v in s]
    return [int(v) for v in str(s).split(",") if str(v).strip()]


def _float_list(s) -> list[float]:
    if isinstance(s, (list, tuple)):
        return [float(v) for v in s]
    return [float(v) for v in str(s).split(",") if str(v).strip()]


def _str_list(s) -> list[str]:
    if isinstance(s, (list, tuple)):
        return [str(v) for v in s]
    return [v.strip() for v in str(s).split(",") if v.strip()]


def _batches(trials: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + _TRIAL_BATCH, trials)) for lo in range(0, trials, _TRIAL_BATCH)]


# ---------------------------------------------------------------- fig2a

def run_fig2a(params, seed, trials, threads):
    m, k = params["M"], params["K"]
    snr = 10.0 ** (params["snr_db"] / 10.0)
    n_drop = params["n_drop"]
    geom = ArrayGeometry(m, 2e9)
    scenarios = ((0, SCENARIO_IID_RAYLEIGH, draw_iid_rayleigh), (1, SCENARIO_LOS_ULA, draw_los_ula))

    def unit(b):
        lo, hi = _batches(trials)[b]
        rows = []
        for t in range(lo, hi):
            for si, name, draw in scenarios:
                h = draw(geom, k, spawn_rng(seed, si, t))
                rows.append(
                    {"trial": t, "scenario": name, "K_served": k,
                     "sum_capacity": capacity.sum_capacity(h, snr)}
                )
                if n_drop:
                    kept = capacity.drop_worst_terminals(h, snr, n_drop)
                    rows.append(
                        {"trial": t, "scenario": name, "K_served": k - n_drop,
                         "sum_capacity": capacity.sum_capacity(h.entries[:, kept], snr)}
                    )
        return rows

    results = run_units(unit, len(_batches(trials)), threads)
    rows = [r for batch in results for r in batch]
    notes = {"fp_bound": capacity.fp_bound(m, k, snr)}
    return ["trial", "scenario", "K_served", "sum_capacity"], rows, notes


# ---------------------------------------------------------------- fig2b

def _pilot_gain_iid(m, k, snr, trials, rng):
    """MR array gain |<hhat, h>|^2 / ||hhat||^2 with MMSE-estimated channels."""
    c = csi_quality(k, snr)
    noise_var = 1.0 / (k * snr)
    h = (rng.standard_normal((trials, m)) + 1j * rng.standard_normal((trials, m))) / np.sqrt(2.0)
    w = (rng.standard_normal((trials, m)) + 1j * rng.standard_normal((trials, m))) * np.sqrt(noise_var / 2.0)
    hhat = c * (h + w)
    num = np.abs(np.sum(hhat.conj() * h, axis=1)) ** 2
    den = np.sum(np.abs(hhat) ** 2, axis=1)
    return float(np.mean(num / den))


def _pilot_gain_los(m, k, snr, trials, rng):
    """Same gain with least-squares estimates of LoS steering channels."""
    noise_var = 1.0 / (k * snr)
    theta = rng.uniform(-np.pi / 2, np.pi / 2, size=trials)
    h = los_steering(m, np.sin(theta)).T
    w = (rng.standard_normal((trials, m)) + 1j * rng.standard_normal((trials, m))) * np.sqrt(noise_var / 2.0)
    hhat = h + w
    num = np.abs(np.sum(hhat.conj() * h, axis=1)) ** 2
    den = np.sum(np.abs(hhat) ** 2, axis=1)
    return float(np.mean(num / den))


def run_fig2b(params, seed, trials, threads):
    k = params["K"]
    snr = 10.0 ** (params["snr_db"] / 10.0)
    m_values = _int_list(params["m_values"])
    cap = params["olb_cap"]

    def unit(i):
        m = m_values[i]
        ell = linproc.fig2b_codebook_size(m, cap)
        return [
            {"M": m, "scheme": "pilot_iid", "gain": _pilot_gain_iid(m, k, snr, trials, spawn_rng(seed, 0, i))},
            {"M": m, "scheme": "pilot_los", "gain": _pilot_gain_los(m, k, snr, trials, spawn_rng(seed, 1, i))},
            {"M": m, "scheme": "olb_los",
             "gain": linproc.olb_array_gain(SCENARIO_LOS_ULA, m, ell, trials, spawn_rng(seed, 2, i))},
            {"M": m, "scheme": "olb_iso",
             "gain": linproc.olb_array_gain(SCENARIO_IID_RAYLEIGH, m, ell, trials, spawn_rng(seed, 3, i))},
        ]

    results = run_units(unit, len(m_values), threads)
    rows = [r for batch in results for r in batch]
    notes = {"csi_quality": csi_quality(k, snr), "olb_cap": cap}
    return ["M", "scheme", "gain"], rows, notes


# ---------------------------------------------------------------- fig3

def run_fig3(params, seed, trials, threads):
    m, k = params["M"], params["K"]
    lengths = _int_list(params["lengths"])
    snr_dbs = _float_list(params["snr_db_values"])
    blocks = trials
    max_iter = params["max_iterations"]
    coh = params["coherence_symbols"]
    codes = {n: make_regular_code(n) for n in lengths}  # built before threading

    units = [(li, si, b) for li in range(len(lengths)) for si in range(len(snr_dbs)) for b in range(blocks)]

    def unit(i):
        li, si, b = units[i]
        code = codes[lengths[li]]
        snr = 10.0 ** (snr_dbs[si] / 10.0)
        rng = spawn_rng(seed, code.n, si, b)
        return linklevel.simulate_block(code, m, k, snr, rng, max_iter, coh)

    results = run_units(unit, len(units), threads)
    rows = []
    for li, n in enumerate(lengths):
        for si, snr_db in enumerate(snr_dbs):
            errors = sum(results[i][0] for i, u in enumerate(units) if u[0] == li and u[1] == si)
            bits = sum(results[i][1] for i, u in enumerate(units) if u[0] == li and u[1] == si)
            rows.append(
                {"snr_db": snr_db, "codeword_length": n, "ber": errors / bits,
                 "bits_simulated": bits, "censored": errors == 0}
            )
    notes = {
        "snr_threshold_db": 10 * np.log10(capacity.snr_threshold(m, k, float(k))),
        "max_iterations": max_iter,
        "coherence_symbols": coh,
        "decoder_backend": backend_name(),
    }
    return ["snr_db", "codeword_length", "ber", "bits_simulated", "censored"], rows, notes


# ---------------------------------------------------------------- fig4a

def run_fig4a(params, seed, trials, threads):
    k = params["K"]
    snr = 10.0 ** (params["snr_db"] / 10.0)
    m_values = _int_list(params["m_values"])
    schemes = _str_list(params["schemes"])
    geom_cache = {m: ArrayGeometry(m, 2e9) for m in m_values}

    def unit(i):
        bi, mi = divmod(i, len(m_values))
        lo, hi = _batches(trials)[bi]
        m = m_values[mi]
        acc = {s: 0.0 for s in schemes}
        for t in range(lo, hi):
            h = draw_iid_rayleigh(geom_cache[m], k, spawn_rng(seed, mi, t))
            if "capacity" in acc:
                acc["capacity"] += capacity.sum_capacity(h, snr)
            if "zf" in acc:
                v = linproc.make_combiner(h.entries, linproc.SCHEME_ZF)
                acc["zf"] += float(np.sum(np.log2(1.0 + linproc.sinr_per_terminal(h, v, snr))))
            if "mr" in acc:
                acc["mr"] += float(np.sum(np.log2(1.0 + linproc.sinr_per_terminal(h, h.entries, snr))))
        return acc

    n_batches = len(_batches(trials))
    results = run_units(unit, n_batches * len(m_values), threads)
    rows = []
    for mi, m in enumerate(m_values):
        sums = {s: 0.0 for s in schemes}
        for bi in range(n_batches):
            for s in schemes:
                sums[s] += results[bi * len(m_values) + mi][s]
        for s in schemes:
            rows.append({"M": m, "scheme": s, "mean_se": sums[s] / trials})
    return ["M", "scheme", "mean_se"], rows, {"K": k, "snr_db": params["snr_db"]}


# ---------------------------------------------------------------- fig4b

def run_fig4b(params, seed, trials, threads):
    m, tau = params["M"], params["tau"]
    snr = 10.0 ** (params["snr_db"] / 10.0)
    k_values = _int_list(params["k_values"])
    schemes = _str_list(params["schemes"])
    grid = multicell.CellGrid(
        num_cells=params["num_cells"],
        pathloss_exponent=params["pathloss_exponent"],
        isolated=bool(params["isolated"]),
    )
    k_max = max(k_values)
    drops = [multicell.draw_received_snr(grid, k_max, snr, spawn_rng(seed, t)) for t in range(trials)]

    def unit(i):
        return multicell.sweep_k(m, tau, schemes[i], grid, snr, k_values, trials, drops=drops)

    results = run_units(unit, len(schemes), threads)
    rows = []
    for sweep in results:
        if not sweep:
            continue
        best_k = max(sweep, key=lambda r: r["sum_se"])["K"]
        for r in sweep:
            rows.append({**r, "is_max": r["K"] == best_k})
    notes = {
        "model": "wrap-around square grid surrogate; qualitative only",
        "num_cells": grid.num_cells,
        "pathloss_exponent": grid.pathloss_exponent,
        "power_control_snr_db": params["snr_db"],
    }
    return ["K", "scheme", "reuse", "sum_se", "is_max"], rows, notes


# ---------------------------------------------------------------- fig5

def run_fig5(params, seed, trials, threads):
    tau_values = _int_list(params["tau_values"])
    m_values = _int_list(params["m_values"])
    terminals_per_antennas = params["antennas_per_terminal"]
    eff = params["efficiency_flops_per_watt"]
    conv = (
        syscost.REAL_FLOPS_CONVENTION
        if params["flop_convention"] == "real"
        else syscost.FlopConvention()
    )
    rows = []
    for tau in tau_values:
        for m in m_values:
            k = m // terminals_per_antennas
            if k < 1 or tau <= k:
                continue
            for scheme in (syscost.SCHEME_MR, syscost.SCHEME_ZF):
                budget = syscost.flops_budget(m, k, tau, scheme, convention=conv)
                for task, flops in budget.tasks.items():
                    rows.append(
                        {"tau": tau, "M": m, "K": k, "scheme": scheme, "task": task,
                         "flops": flops, "watts": syscost.power_from_flops(flops, eff)}
                    )
                rows.append(
                    {"tau": tau, "M": m, "K": k, "scheme": scheme, "task": "total",
                     "flops": budget.total_flops,
                     "watts": syscost.power_from_flops(budget.total_flops, eff)}
                )
    notes = {"flop_convention": conv.describe(), "efficiency_flops_per_watt": eff}
    return ["tau", "M", "K", "scheme", "task", "flops", "watts"], rows, notes


# ---------------------------------------------------------------- fig6

def run_fig6(params, seed, trials, threads):
    tau = params["tau"]
    m_values = _int_list(params["m_values"])
    k_values = _int_list(params["k_values"])
    modes = _str_list(params["modes"])
    rows = []
    for mode in modes:
        rows.extend(syscost.feasibility_map(mode, tau, params["max_overhead"], m_values, k_values))
    notes = {"max_overhead": params["max_overhead"]}
    return ["mode", "tau", "M", "K", "ul_fraction", "dl_fraction", "bucket"], rows, notes


# ---------------------------------------------------------------- channels

def run_channels(params, seed, trials, threads):
    """Dump raw channel realizations (columns: trial, m, k, re, im)."""
    geom = ArrayGeometry(params["M"], 2e9)
    draw = draw_los_ula if params["scenario"] == SCENARIO_LOS_ULA else draw_iid_rayleigh
    rows = []
    for t in range(trials):
        h = draw(geom, params["K"], spawn_rng(seed, t)).entries
        for m in range(h.shape[0]):
            for k in range(h.shape[1]):
                rows.append(
                    {"trial": t, "m": m, "k": k, "re": float(h[m, k].real), "im": float(h[m, k].imag)}
                )
    return ["trial", "m", "k", "re", "im"], rows, {"scenario": params["scenario"]}


# ---------------------------------------------------------------- powerctl

DEFAULT_LINKS = "0.90:2.0,0.85:1.0,0.80:0.5,0.75:0.25,0.70:0.125,0.65:0.0625"


def _parse_links(spec: str) -> list[powerctl.UserLink]:
    """Inline 'c:snr,c:snr,...' pairs, or a path to a CSV with header
    c_csi,snr_d."""
    import os

    if ":" not in spec and os.path.exists(spec):
        with open(spec) as f:
            lines = [ln.strip() for ln in f if ln.strip()]
        if not lines or lines[0].split(",")[:2] != ["c_csi", "snr_d"]:
            raise ValueError(f"links file {spec} must have header c_csi,snr_d")
        return [
            powerctl.UserLink(float(c), float(s))
            for c, s, *_ in (ln.split(",") for ln in lines[1:])
        ]
    links = []
    for item in _str_list(spec):
        c, s = item.split(":")
        links.append(powerctl.UserLink(float(c), float(s)))
    return links


def run_powerctl(params, seed, trials, threads):
    links = _parse_links(params["links"])
    m, tau = params["M"], params["tau"]
    sol = powerctl.maxmin_power_control(links, m, tol=params["tol"])
    k = len(links)
    rates = powerctl.achieved_rates(links, m, sol.allocation.eta)
    prelog = max(0.0, 1.0 - k / tau)
    rows = []
    for i, link in enumerate(links):
        rows.append(
            {"k": i, "c_csi": link.csi_quality, "snr_d": link.snr_d,
             "eta": float(sol.allocation.eta[i]), "rate": float(rates[i]),
             "net_se": float(prelog * rates[i])}
        )
    notes = {"maxmin_rate": sol.rate, "status": sol.status, "prelog": prelog}
    return ["k", "c_csi", "snr_d", "eta", "rate", "net_se"], rows, notes


# ---------------------------------------------------------------- sweep

def run_sweep(params, seed, trials, threads):
    rows = []
    link = params["link"]
    tau = params["tau"]
    for m in _int_list(params["m_values"]):
        for k in _int_list(params["k_values"]):
            if k >= tau:
                raise InfeasibleError(f"K = {k} does not fit in tau = {tau}")
            for snr_db in _float_list(params["snr_db_values"]):
                snr = 10.0 ** (snr_db / 10.0)
                se = capacity.se_closed_form(m, k, tau, snr, link=link)
                rows.append(
                    {"M": m, "K": k, "tau": tau, "snr_db": snr_db, "link": link,
                     "se": se, "fp_bound": capacity.fp_bound(m, k, snr)}
                )
    return ["M", "K", "tau", "snr_db", "link", "se", "fp_bound"], rows, {}


# ---------------------------------------------------------------- registry

EXPERIMENTS = {
    "fig2a": {
        "runner": run_fig2a,
        "defaults": {"M": 100, "K": 12, "snr_db": -5.0, "n_drop": 2},
        "trials": 10000,
        "description": "CDF of uplink sum capacity, isotropic vs LoS, with terminal dropping",
    },
    "fig2b": {
        "runner": run_fig2b,
        "defaults": {
            "K": 12,
            "snr_db": -5.0,
            "m_values": ",".join(str(v) for v in range(10, 201, 10)),
            "olb_cap": 50,
        },
        "trials": 2000,
        "description": "Average array gain vs M: pilot-based vs open-loop beamforming",
    },
    "fig3": {
        "runner": run_fig3,
        "defaults": {
            "M": 100,
            "K": 30,
            "lengths": "1024,4096,16384",
            "snr_db_values": "-16,-15,-14.5,-14,-13.5,-13,-12.5,-12,-11.5,-11,-10.5,-10",
            "max_iterations": 50,
            "coherence_symbols": 200,
        },
        "trials": 4,
        "description": "Coded uplink BER vs SNR for several codeword lengths",
    },
    "fig4a": {
        "runner": run_fig4a,
        "defaults": {
            "K": 20,
            "snr_db": -5.0,
            "m_values": ",".join(str(v) for v in range(20, 121, 10)),
            "schemes": "capacity,zf,mr",
        },
        "trials": 1000,
        "description": "Sum capacity vs linear processing, perfect CSI, single cell",
    },
    "fig4b": {
        "runner": run_fig4b,
        "defaults": {
            "M": 100,
            "tau": 200,
            "snr_db": -5.0,
            "k_values": ",".join(str(v) for v in range(2, 151, 2)),
            "schemes": "mr,zf",
            "num_cells": 4,
            "pathloss_exponent": 3.7,
            "isolated": 0,
        },
        "trials": 30,
        "description": "Multi-cell sum SE vs number of terminals with optimized pilot reuse",
    },
    "fig5": {
        "runner": run_fig5,
        "defaults": {
            "tau_values": "100,200,500,1000,2000,5000",
            "m_values": ",".join(str(v) for v in range(20, 401, 20)),
            "antennas_per_terminal": 5,
            "efficiency_flops_per_watt": 12.8e9,
            "flop_convention": "complex-op",
        },
        "trials": 1,
        "description": "Baseband flop and power budget vs coherence block and array size",
    },
    "fig6": {
        "runner": run_fig6,
        "defaults": {
            "tau": 200,
            "m_values": ",".join(str(v) for v in range(10, 401, 10)),
            "k_values": ",".join(str(v) for v in range(5, 196, 5)),
            "max_overhead": 0.5,
            "modes": "tdd,fdd",
        },
        "trials": 1,
        "description": "TDD vs FDD CSI-acquisition overhead feasibility map",
    },
    "powerctl": {
        "runner": run_powerctl,
        "defaults": {"M": 100, "tau": 200, "tol": 1e-9, "links": DEFAULT_LINKS},
        "trials": 1,
        "description": "Max-min fairness downlink power control for a table of user links",
    },
    "channels": {
        "runner": run_channels,
        "defaults": {"M": 16, "K": 4, "scenario": SCENARIO_IID_RAYLEIGH},
        "trials": 10,
        "description": "Dump raw channel realizations as trial,m,k,re,im rows",
    },
    "sweep": {
        "runner": run_sweep,
        "defaults": {
            "m_values": "50,100,200",
            "k_values": "10,20,30",
            "tau": 200,
            "snr_db_values": "-10,-5,0",
            "link": "uplink",
        },
        "trials": 1,
        "description": "Closed-form spectral efficiency over a parameter grid",
    },
}


def validate(name: str, params: dict, trials: int) -> list[tuple[str, str]]:
    """Dry-run parameter and feasibility checks; returns (level, message) pairs."""
    findings = []
    if name == "fig3":
        for n in _int_list(params["lengths"]):
            if abs(np.log2(n) - round(np.log2(n))) > 0.3:
                findings.append(
                    ("warning", f"codeword length {n} is far from a power of two; allowed but nonstandard")
                )
        if params["K"] >= params["coherence_symbols"]:
            findings.append(("error", "K pilots do not fit in one coherence interval"))
    if name == "fig4b":
        tau, m = params["tau"], params["M"]
        for k in _int_list(params["k_values"]):
            if k >= tau:
                findings.append(("error", f"K = {k} >= tau = {tau}"))
                break
        if "zf" in _str_list(params["schemes"]) and max(_int_list(params["k_values"])) > m:
            findings.append(("warning", f"ZF rows limited to K <= M = {m}"))
    if name == "sweep":
        tau = params["tau"]
        for k in _int_list(params["k_values"]):
            if k >= tau:
                findings.append(("error", f"K = {k} >= tau = {tau}"))
    if name == "fig2a" and params["n_drop"] >= params["K"]:
        findings.append(("error", "n_drop must be smaller than K"))
    if trials < 1:
        findings.append(("error", "trials must be >= 1"))
    if not findings:
        findings.append(("ok", "parameters are feasible"))
    return findings
