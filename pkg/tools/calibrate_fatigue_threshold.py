"""Calibration run behind the frozen fatigue ceiling in test_acceptance.py.

Pits an always-issue feed (all-error one-shot events, so the baseline table
issues every alert) against the learned policy for the same fatigued user,
with every seed pinned. The ceiling committed in the acceptance test is
0.85 x the always-issue run's negative feedback rate. Rerun this script
after any change to the reward table, the feature vector, or the PRF to
re-derive the number.
"""

from alertgate.model import DurationKind, Severity
from alertgate.simulator import (
    SimulationSpec,
    SyntheticUser,
    Workload,
    WorkloadSource,
    run_simulation,
)

USER = SyntheticUser(
    user_id="u1",
    base_engage=0.9,
    fatigue_kappa=0.3,
    rng_seed=42,
    availability_threshold=0.01,
)
WORKLOAD = Workload(
    sources=(
        WorkloadSource(
            source_id="flood",
            event_type="task.ping",
            poisson_rate_per_hour=10.0,
            severity_mix={Severity.ERROR: 1.0},
            duration_kind=DurationKind.ONE_SHOT,
        ),
    ),
    duration_days=22.0,
    seed=13,
)


def main() -> None:
    rates = {}
    for mode in ("baseline", "learned"):
        spec = SimulationSpec(
            users=(USER,),
            mode=mode,
            seed=5,
            duration_days=22.0,
            workload=WORKLOAD,
        )
        report, _ = run_simulation(spec)
        rates[mode] = report["metrics"]["negative_feedback_rate"]
        print(
            f"{mode}: events={report['counts']['events']}"
            f" notifications={report['counts']['notifications']}"
            f" negative_feedback_rate={rates[mode]}"
        )
    ceiling = round(0.85 * rates["baseline"], 6)
    reduction = round(1 - rates["learned"] / rates["baseline"], 4)
    print(f"ceiling (0.85 x always-issue rate): {ceiling}")
    print(f"observed relative reduction: {reduction}")


if __name__ == "__main__":
    main()
