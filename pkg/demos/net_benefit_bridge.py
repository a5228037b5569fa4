"""Net Benefit read off H-accuracy with the risk penalty.

For every risk threshold the script computes Net Benefit twice, once from
thresholded rates and once through H-accuracy with risk-derived priorities,
and prints both next to the standardized version and confident accuracy.
"""

import numpy as np

from haccuracy.analysis import nb_ha_curves
from haccuracy.core import Dataset
from haccuracy.metrics import balanced_accuracy, net_benefit, risk_rates


def calibrated_model(n=300, seed=1):
    rng = np.random.default_rng(seed)
    risk = rng.beta(2, 2, n)
    y = (rng.uniform(size=n) < risk).astype(int)
    return Dataset.from_arrays(("neg", "pos"), y, np.column_stack([1 - risk, risk]))


if __name__ == "__main__":
    ds = calibrated_model()
    taus = [round(0.05 * i, 2) for i in range(1, 20)]
    table = nb_ha_curves(ds, taus)
    print(f"balanced accuracy {balanced_accuracy(ds):.4f}")
    print(f"{'tau':>5} {'NB(rates)':>10} {'NB(Ha)':>10} {'sNB':>8} {'conf.acc':>9} {'Ha_risk':>8}")
    for (tau,), (nb, snb, conf, ha_risk) in table.rows:
        direct = net_benefit(risk_rates(ds, tau), tau)
        print(f"{tau:5.2f} {direct:10.6f} {nb:10.6f} {snb:8.4f} {conf:9.4f} {ha_risk:8.4f}")
