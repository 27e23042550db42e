"""The six exhibit runners.

Each runner consumes environment constructors plus the solvers, self-certifies
its qualitative contracts (orderings, zeros, equalities) in-process, and emits
one artifact record whose metrics block is a deterministic function of the
configuration. Runners never mutate environments and may run in any order.

Exhibit configurations derive from a named base profile ("paper" by default,
"fast" for a smaller CI ring). Per-exhibit parameter overrides are part of
each exhibit's config block and therefore of its hash:

- packaging and nulls use the base profile directly;
- holonomy uses a movement-is-free variant on a wider ring so the viability
  kernel carries a nontrivial action channel at every horizon;
- ablations and the sweep use a maintenance-economy variant (unit action
  costs, per-step income, damage leak) in which an unrepaired damage bit
  drains the ledger, so removing repair genuinely collapses viability;
- learning zeroes all action costs and sweeps the skill sector.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from agencykit.artifacts import ArtifactRecord, make_artifact
from agencykit.empowerment import (
    feasible_empowerment,
    lower_median,
    median_empowerment_on_kernel,
    rollout_output_distribution,
    total_variation,
)
from agencykit.environments import (
    LEFT,
    RIGHT,
    PROFILES,
    RingWorldConfig,
    build_null_single_action,
    build_ringworld,
    build_schedule_trap,
    ring_state_index,
)
from agencykit.packaging import idempotence_defect, packaging_endomap
from agencykit.viability import viability_kernel

EXHIBITS = ("packaging", "nulls", "holonomy", "ablations", "sweep", "learning")

TAU_GRID = (0, 1, 2, 3, 4)
HORIZON_GRID = (1, 2, 3, 4, 5)

EMPOWERMENT_TOL = 1e-9
MAX_MEDIAN_STATES = 64


def base_profile(profile: str) -> RingWorldConfig:
    try:
        return PROFILES[profile]
    except KeyError:
        raise ValueError(f"unknown profile {profile!r}; known: {sorted(PROFILES)}") from None


def holonomy_config(profile: str, protocol_on: bool) -> RingWorldConfig:
    """Free-movement, wide-ring variant; regimes differ only in the protocol toggle."""
    base = base_profile(profile)
    return replace(
        base,
        ring_size=16,
        p_slip=0.1,
        cost_left=0,
        cost_right=0,
        protocol_on=protocol_on,
    )


def maintenance_economy_config(profile: str) -> RingWorldConfig:
    """Unit-cost actions, per-step income, and a damage leak on the ledger."""
    base = base_profile(profile)
    return replace(
        base,
        cost_left=1,
        cost_right=1,
        cost_repair=1,
        cost_noop=0,
        ledger_gain=1,
        gain_every_step=True,
        damage_leak=2,
    )


def ablation_configs(profile: str) -> dict[str, RingWorldConfig]:
    base = maintenance_economy_config(profile)
    return {
        "constraints_off": replace(base, cost_left=0, cost_right=0, cost_repair=0, cost_noop=0),
        "full": base,
        "high_noise": replace(base, p_flip=0.3),
        "learn_on": replace(base, learning_on=True, theta_levels=2),
        "no_protocol": replace(base, protocol_on=False),
        "no_repair": replace(base, repair_enabled=False),
        "repair_imperfect": replace(base, repair_success=0.2),
    }


def learning_config(profile: str, p_slip: float) -> RingWorldConfig:
    """All action costs zero (feasibility trivial); three-level skill sector."""
    base = base_profile(profile)
    return replace(
        base,
        cost_left=0,
        cost_right=0,
        cost_repair=0,
        cost_noop=0,
        p_slip=p_slip,
        protocol_on=False,
        learning_on=True,
        theta_levels=3,
    )


def run_nulls() -> ArtifactRecord:
    """Null regimes: single-action cycle and the exogenous-schedule trap."""
    null_a = build_null_single_action()
    caps_a = {
        f"H{h}": feasible_empowerment(null_a.kernel, null_a.gate, 0, h, null_a.output_lens)
        for h in (1, 2, 3)
    }
    caps_b = {}
    for model in ("wrong", "right"):
        env = build_schedule_trap(model)
        caps_b[model] = feasible_empowerment(env.kernel, env.gate, 0, 1, env.output_lens)

    contracts = {
        "null_a_zero_all_horizons": all(abs(v) <= 1e-12 for v in caps_a.values()),
        "null_b_wrong_model_one_bit": abs(caps_b["wrong"] - 1.0) <= 1e-6,
        "null_b_right_model_zero": abs(caps_b["right"]) <= 1e-6,
    }
    config = {
        "exhibit": "nulls",
        "null_a": build_null_single_action().config_echo,
        "null_b_wrong": build_schedule_trap("wrong").config_echo,
        "null_b_right": build_schedule_trap("right").config_echo,
        "horizons_null_a": [1, 2, 3],
        "horizon_null_b": 1,
        "capacity_tol_bits": EMPOWERMENT_TOL,
    }
    metrics = {
        "null_a": caps_a,
        "null_b": caps_b,
        "contracts": contracts,
    }
    return make_artifact("nulls", config, metrics)


def run_packaging(profile: str = "paper") -> ArtifactRecord:
    """Idempotence defect across tau for repair-off vs repair-on policies."""
    cfg = base_profile(profile)
    env = build_ringworld(cfg)
    regimes = {"repair_off": "always_right", "repair_on": "repair_then_right"}
    defects: dict[str, list[float]] = {name: [] for name in regimes}
    endomaps: dict[str, dict] = {}
    for regime, policy_name in regimes.items():
        for tau in TAU_GRID:
            e = packaging_endomap(
                env.kernel, env.macro_lens, env.policies[policy_name], tau, policy_name
            )
            defects[regime].append(idempotence_defect(e))
            endomaps[f"{env.macro_lens.name}|{policy_name}|tau{tau}"] = {
                "mapping": [e.mapping[x] for x in sorted(e.mapping)],
                "reach_mass": [e.reach_mass[x] for x in sorted(e.mapping)],
                "domain": sorted(e.mapping),
            }

    i2 = TAU_GRID.index(2)
    contracts = {
        "tau0_defect_zero_both": defects["repair_off"][0] == 0.0 and defects["repair_on"][0] == 0.0,
        "tau2_repair_on_zero": defects["repair_on"][i2] == 0.0,
        "tau2_repair_off_high": defects["repair_off"][i2] >= 0.9,
    }
    config = {
        "exhibit": "packaging",
        "profile": profile,
        "environment": cfg.to_dict(),
        "tau_grid": list(TAU_GRID),
        "macro_lens": env.macro_lens.name,
        "policies": regimes,
    }
    metrics = {
        "state_layout": env.state_layout,
        "tau_grid": list(TAU_GRID),
        "defect": defects,
        "endomaps": endomaps,
        "contracts": contracts,
    }
    return make_artifact("packaging", config, metrics)


def run_holonomy(profile: str = "paper") -> ArtifactRecord:
    """Median feasible empowerment vs horizon for protocol on/off, plus TV witness."""
    results = {}
    envs = {}
    for regime, protocol in (("protocol_on", True), ("protocol_off", False)):
        cfg = holonomy_config(profile, protocol)
        env = build_ringworld(cfg)
        envs[regime] = (cfg, env)
        vres = viability_kernel(env.kernel, env.gate, env.safety_ledger_only)
        medians = []
        per_state = {}
        subset_rule = None
        for h in HORIZON_GRID:
            med = median_empowerment_on_kernel(
                env.kernel, env.gate, vres.kernel, h, env.output_lens,
                max_states=MAX_MEDIAN_STATES, tol=EMPOWERMENT_TOL,
            )
            medians.append(med.median_bits)
            per_state[f"H{h}"] = med.values
            subset_rule = med.subset_rule
        results[regime] = {
            "kernel_size": vres.size,
            "kernel_members": vres.indices,
            "kernel_trace": vres.trace,
            "medians": medians,
            "per_state": per_state,
            "selected_states": med.selected_states,
            "subset_rule": subset_rule,
        }

    # noncommutativity witness: (RIGHT, LEFT) vs (LEFT, RIGHT) from the
    # matched full-budget start state (y=0, u=0, phi=1, r=R_max)
    witness = {}
    for regime, (cfg, env) in envs.items():
        s_star = ring_state_index(cfg, y=0, u=0, phi=1, r=cfg.ledger_max)
        w_a = rollout_output_distribution(env.kernel, s_star, (RIGHT, LEFT), env.output_lens)
        w_b = rollout_output_distribution(env.kernel, s_star, (LEFT, RIGHT), env.output_lens)
        witness[regime] = {
            "start_state": s_star,
            "start_tuple": {"y": 0, "u": 0, "phi": 1, "r": cfg.ledger_max},
            "tv": total_variation(w_a, w_b),
            "alpha_output_distribution": w_a.tolist(),
            "beta_output_distribution": w_b.tolist(),
        }

    on = np.array(results["protocol_on"]["medians"])
    off = np.array(results["protocol_off"]["medians"])
    contracts = {
        "h1_medians_equal": abs(on[0] - off[0]) <= 1e-9,
        "gap_at_least_02_for_h2_to_h5": bool(np.all(on[1:] - off[1:] >= 0.2)),
        "tv_witness_gap": witness["protocol_on"]["tv"] - witness["protocol_off"]["tv"] >= 0.3,
        "kernel_sizes_equal": results["protocol_on"]["kernel_size"]
        == results["protocol_off"]["kernel_size"],
    }
    config = {
        "exhibit": "holonomy",
        "profile": profile,
        "environment_on": holonomy_config(profile, True).to_dict(),
        "environment_off": holonomy_config(profile, False).to_dict(),
        "horizons": list(HORIZON_GRID),
        "output_lens": "outside_position",
        "safety": "ledger_only",
        "max_states": MAX_MEDIAN_STATES,
        "capacity_tol_bits": EMPOWERMENT_TOL,
        "witness_sequences": {"alpha": ["RIGHT", "LEFT"], "beta": ["LEFT", "RIGHT"]},
    }
    env_on = envs["protocol_on"][1]
    metrics = {
        "state_layout": env_on.state_layout,
        "horizons": list(HORIZON_GRID),
        "protocol_on": results["protocol_on"],
        "protocol_off": results["protocol_off"],
        "witness": witness,
        "witness_alpha_on_distribution": witness["protocol_on"]["alpha_output_distribution"],
        "contracts": contracts,
    }
    return make_artifact("holonomy", config, metrics)


def run_ablations(profile: str = "paper") -> ArtifactRecord:
    """Primitive toggle suite: |K|, median empowerment at H=2, defect at tau=2."""
    configs = ablation_configs(profile)
    rows = {}
    for name, cfg in sorted(configs.items()):
        env = build_ringworld(cfg)
        vres = viability_kernel(env.kernel, env.gate, env.safety_ledger_only)
        med = median_empowerment_on_kernel(
            env.kernel, env.gate, vres.kernel, 2, env.output_lens,
            max_states=MAX_MEDIAN_STATES, tol=EMPOWERMENT_TOL,
        )
        endo = packaging_endomap(
            env.kernel, env.macro_lens, env.policies["repair_then_right"], 2,
            "repair_then_right",
        )
        rows[name] = {
            "n_states": env.n_states,
            "kernel_size": vres.size,
            "kernel_members": vres.indices,
            "kernel_iterations": vres.iterations,
            "kernel_trace": vres.trace,
            "empowerment_median": med.median_bits,
            "subset_rule": med.subset_rule,
            "packaging_defect": idempotence_defect(endo),
        }

    contracts = {
        "no_repair_kernel_empty": rows["no_repair"]["kernel_size"] == 0,
        "no_repair_empowerment_zero": rows["no_repair"]["empowerment_median"] == 0.0,
        "full_no_protocol_equal_kernel": rows["full"]["kernel_size"]
        == rows["no_protocol"]["kernel_size"],
        "full_no_protocol_equal_defect": rows["full"]["packaging_defect"]
        == rows["no_protocol"]["packaging_defect"],
        "full_beats_no_protocol_empowerment": rows["full"]["empowerment_median"]
        > rows["no_protocol"]["empowerment_median"],
        "constraints_off_defect_exceeds_full": rows["constraints_off"]["packaging_defect"]
        > rows["full"]["packaging_defect"],
        "repair_imperfect_defect_zero": rows["repair_imperfect"]["packaging_defect"] == 0.0,
        "repair_imperfect_below_full_empowerment": rows["repair_imperfect"]["empowerment_median"]
        < rows["full"]["empowerment_median"],
        "learn_on_doubles_state_count": rows["learn_on"]["n_states"]
        == 2 * rows["full"]["n_states"],
    }
    config = {
        "exhibit": "ablations",
        "profile": profile,
        "configs": {name: cfg.to_dict() for name, cfg in configs.items()},
        "empowerment_horizon": 2,
        "packaging_tau": 2,
        "output_lens": "outside_position",
        "macro_lens": "macro_y_r_phi",
        "safety": "ledger_only",
        "max_states": MAX_MEDIAN_STATES,
    }
    env_full = build_ringworld(configs["full"])
    metrics = {
        "state_layout": env_full.state_layout,
        "rows": rows,
        "contracts": contracts,
    }
    return make_artifact("ablations", config, metrics)


def run_sweep(profile: str = "paper") -> ArtifactRecord:
    """8x8 noise/maintenance-cost grid under the coherence safety predicate."""
    base = maintenance_economy_config(profile)
    p_grid = [round(v, 10) for v in np.linspace(0.0, 0.7, 8)]
    cost_grid = list(range(8))
    kernel_sizes = np.zeros((8, 8), dtype=np.int64)
    emp = np.zeros((8, 8))
    for i, p in enumerate(p_grid):
        for j, c in enumerate(cost_grid):
            cfg = replace(base, p_flip=float(p), cost_repair=int(c))
            env = build_ringworld(cfg)
            vres = viability_kernel(env.kernel, env.gate, env.safety_coherent)
            kernel_sizes[i, j] = vres.size
            med = median_empowerment_on_kernel(
                env.kernel, env.gate, vres.kernel, 2, env.output_lens,
                max_states=MAX_MEDIAN_STATES, tol=EMPOWERMENT_TOL,
            )
            emp[i, j] = med.median_bits

    mono_noise = all(
        kernel_sizes[i + 1, j] <= kernel_sizes[i, j] for i in range(7) for j in range(8)
    )
    mono_cost = all(
        kernel_sizes[i, j + 1] <= kernel_sizes[i, j] for i in range(8) for j in range(7)
    )
    contracts = {
        "kernel_monotone_in_noise": mono_noise,
        "kernel_monotone_in_cost": mono_cost,
        "hostile_corner_collapses": int(kernel_sizes[-1, -1]) == 0,
        "empty_kernel_zero_empowerment": all(
            emp[i, j] == 0.0
            for i in range(8)
            for j in range(8)
            if kernel_sizes[i, j] == 0
        ),
    }
    config = {
        "exhibit": "sweep",
        "profile": profile,
        "base_environment": base.to_dict(),
        "p_flip_grid": p_grid,
        "cost_repair_grid": cost_grid,
        "empowerment_horizon": 2,
        "safety": "ledger_and_coherent",
        "output_lens": "outside_position",
        "max_states": MAX_MEDIAN_STATES,
    }
    metrics = {
        "state_layout": build_ringworld(base).state_layout,
        "p_flip_grid": p_grid,
        "cost_repair_grid": cost_grid,
        "kernel_size_grid": kernel_sizes.tolist(),
        "empowerment_grid": emp.tolist(),
        "kernel_size_min": int(kernel_sizes.min()),
        "kernel_size_max": int(kernel_sizes.max()),
        "empowerment_min": float(emp.min()),
        "empowerment_max": float(emp.max()),
        "contracts": contracts,
    }
    return make_artifact("sweep", config, metrics)


def run_learning(profile: str = "paper") -> ArtifactRecord:
    """Median empowerment per skill level, with a zero-slip control group.

    Medians are taken over viable states restricted to a fixed staged phase
    (phi = 0) and a coherent internal bit (u = 0) within each skill sector.
    """
    def sector_medians(p_slip: float) -> tuple[list[float], dict]:
        cfg = learning_config(profile, p_slip)
        env = build_ringworld(cfg)
        vres = viability_kernel(env.kernel, env.gate, env.safety_ledger_only)
        medians = []
        per_theta = {}
        for theta in range(cfg.theta_levels):
            selected = [
                i
                for i, (y, u, phi, r, th) in enumerate(env.state_tuples)
                if th == theta and u == 0 and phi == 0 and vres.kernel[i]
            ]
            values = [
                feasible_empowerment(env.kernel, env.gate, s, 2, env.output_lens,
                                     tol=EMPOWERMENT_TOL)
                for s in selected
            ]
            medians.append(lower_median(values) if values else 0.0)
            per_theta[f"theta{theta}"] = {"states": selected, "values": values}
        return medians, per_theta

    slip = 0.2
    medians, per_theta = sector_medians(slip)
    control_medians, _ = sector_medians(0.0)

    contracts = {
        "medians_strictly_increase_with_skill": medians[0] < medians[1] < medians[2],
        "zero_slip_control_equal": control_medians[0] == control_medians[1] == control_medians[2],
    }
    config = {
        "exhibit": "learning",
        "profile": profile,
        "environment": learning_config(profile, slip).to_dict(),
        "control_environment": learning_config(profile, 0.0).to_dict(),
        "empowerment_horizon": 2,
        "output_lens": "outside_position",
        "restriction": {"u": 0, "phi": 0, "viable": True},
        "safety": "ledger_only",
    }
    metrics = {
        "state_layout": build_ringworld(learning_config(profile, slip)).state_layout,
        "theta_values": [0, 1, 2],
        "medians": medians,
        "control_medians": control_medians,
        "per_theta": per_theta,
        "contracts": contracts,
    }
    return make_artifact("learning", config, metrics)


RUNNERS = {
    "nulls": lambda profile: run_nulls(),
    "packaging": run_packaging,
    "holonomy": run_holonomy,
    "ablations": run_ablations,
    "sweep": run_sweep,
    "learning": run_learning,
}


def run_exhibit(name: str, profile: str = "paper") -> ArtifactRecord:
    if name not in RUNNERS:
        raise ValueError(f"unknown exhibit {name!r}; known: {sorted(RUNNERS)}")
    return RUNNERS[name](profile)


def contracts_passed(record: ArtifactRecord) -> bool:
    return all(record.metrics.get("contracts", {}).values())
