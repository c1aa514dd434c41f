#!/usr/bin/env python3
"""Regenerate the bundled reference certificates under src/aifdom/data/.

Each file packages one published dominance matrix in the standard
certificate JSON format, together with the proxy region on which this
toolkit verifies it (inflated hull of the corresponding simulated
attractor, margin from the standard fallback schedule) and the verified
residual margin. Deterministic; run from the repository root.
"""

from pathlib import Path

import numpy as np

from aifdom.circuit_models import ControllerParams, FopPlantParams, fop_closed_loop
from aifdom.dominance import DominanceCertificate, save_certificate, verify_certificate
from aifdom.ode_sim import simulate_and_classify
from aifdom.regions import hull_of_points, relative_margin

P_0DOM_BASE = [
    [82.7650, -79.6308, -24.2526, -42.5767],
    [-79.6308, 89.5784, 24.7259, 43.0863],
    [-24.2526, 24.7259, 79.5742, 24.4801],
    [-42.5767, 43.0863, 24.4801, 83.9389],
]
P_2DOM_THETA2_4 = [
    [-6.0678, 18.1011, -60.7826, 57.3881],
    [18.1011, -14.2661, 60.3814, -57.2023],
    [-60.7826, 60.3814, 0.7924, -42.0355],
    [57.3881, -57.2023, -42.0355, -228.9326],
]
P_2DOM_K_4 = [
    [-15.2507, 32.0157, -83.0632, 26.8417],
    [32.0157, -26.7504, 82.5277, -26.8390],
    [-83.0632, 82.5277, -4.1886, -15.9095],
    [26.8417, -26.8390, -15.9095, -26.8531],
]

CASES = [
    # (file stem, P, lambda, degree, plant params, t_end, hull transient fraction)
    ("cert_fop_baseline_0dom", P_0DOM_BASE, 0.0, 0, FopPlantParams(1.0, 1.0, 1.0, 1.0), 100.0, 0.0),
    ("cert_fop_theta2_4_2dom", P_2DOM_THETA2_4, 1.0, 2, FopPlantParams(1.0, 4.0, 1.0, 1.0), 300.0, 0.5),
    ("cert_fop_k4_2dom", P_2DOM_K_4, 1.0, 2, FopPlantParams(1.0, 1.0, 4.0, 1.0), 300.0, 0.5),
]

HALVINGS = 3  # margin schedule step on which all three matrices verify


def main() -> None:
    out_dir = Path(__file__).resolve().parents[1] / "src" / "aifdom" / "data"
    out_dir.mkdir(parents=True, exist_ok=True)
    cp = ControllerParams(mu=2.0, eta=10.0)
    for stem, P, lam, degree, pp, t_end, tf in CASES:
        model = fop_closed_loop(cp, pp)
        traj, _ = simulate_and_classify(model, [1.0, 1.0, 1.0, 1.0], t_end)
        _, states = traj.post_transient(tf)
        pts = states[:, :2]
        margin = relative_margin(pts, 0.25) / 2**HALVINGS
        region = hull_of_points(model.dim, pts, margin=margin)
        P = np.asarray(P, dtype=float)
        report = verify_certificate(model, region, P, lam, degree)
        if not report.passed:
            raise SystemExit(f"{stem}: verification failed: {report.reason}")
        cert = DominanceCertificate(
            P=P,
            lam=lam,
            epsilon=report.epsilon,
            p_degree=degree,
            region=region,
            residual_margin=report.residual_margin,
            checked_points=report.checked_points,
        )
        path = out_dir / f"{stem}.json"
        save_certificate(cert, path)
        print(f"wrote {path} (residual margin {report.residual_margin:.6g}, {report.n_checked} points)")


if __name__ == "__main__":
    main()
