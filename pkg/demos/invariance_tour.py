"""Which confusion-matrix changes leave prioritized H-accuracy untouched.

Prints the verdict of every check in the invariance suite together with the
stored column-scaling counterexample.
"""

from haccuracy.analysis import I7_COUNTEREXAMPLE, apply_cm_transform, run_invariance_suite
from haccuracy.core import ConfusionMatrix

if __name__ == "__main__":
    for case, verdict in run_invariance_suite(trials=1000, seed=0):
        status = "invariant" if verdict.invariant else "changes"
        flag = "" if verdict.invariant == case.expect_invariant else "   <-- unexpected"
        print(f"{verdict.property_name:3} {case.kind:14} {case.metric.name:18} {status}{flag}")

    metric, transform, base, _, _, _ = I7_COUNTEREXAMPLE
    before = ConfusionMatrix.binary(*base)
    after = apply_cm_transform(before, transform)
    print(f"\ncolumn scaling {transform.params}: (tp, fn, fp, tn) {before.cells()} -> "
          f"{after.cells()}, {metric.name} {metric(before):.6f} -> {metric(after):.6f}")
