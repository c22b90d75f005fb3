"""Optimize the recovery at alpha=2, T=0.35, gamma=0.9, eta=0.95 and report F_w and success probabilities."""

import argparse
import time

from catsuppress import channels
from catsuppress.channels import HeraldingSet, PipelineParams
from catsuppress.optimizer import AscentConfig, optimize
from catsuppress.recovery import canonical_recovery, pipeline_noise, worst_case_fidelity


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--restarts", type=int, default=8)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    pp = PipelineParams(2.0, 0.35, 0.9, eta=0.95)
    e = pp.effective()
    noise = pipeline_noise(pp)
    print(f"gain g = {e.g:.10f}, T_eff = {e.t_eff:.10f}, gamma_eff = {e.gamma_eff:.10f}")

    canon = worst_case_fidelity(canonical_recovery(noise.alpha_tilde, noise.alpha_bar), noise)
    print(f"canonical recovery F_w = {canon.fidelity:.10f}")

    t0 = time.perf_counter()
    res = optimize(noise, AscentConfig(seed=args.seed, restarts=args.restarts, workers=args.workers))
    print(f"optimized F_w = {res.fidelity:.10f} ({time.perf_counter() - t0:.1f}s)")
    for i, t in enumerate(res.traces):
        print(f"  restart {i}: F_w {max(t.fidelity):.8f} after {len(t)} steps, plateau {t.stopped_early}")
    print(f"off-block parity mass {res.off_block:.2e}")

    for name, h in [("standard", HeraldingSet.standard()), ("any n <= 10", HeraldingSet.any_n(10)),
                    ("generalized n, x <= 10", HeraldingSet.generalized(10, 10))]:
        p = channels.min_success_probability(pp, h).probability
        print(f"min success probability, {name}: {100 * p:.4f}%")


if __name__ == "__main__":
    main()
