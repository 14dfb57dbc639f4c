"""Gradient audit: every variant's hand-derived backprop vs finite differences.

Run:  python demos/06_gradient_audit.py     (about ten seconds)
"""

from modgate.gradcheck import gradient_check
from modgate.models import VARIANTS

print("central-difference audit at d=8, m=8, r=6, l=3 (epsilon 1e-5):\n")
for variant in VARIANTS:
    worst = max(gradient_check(variant, seed) for seed in range(5))
    verdict = "ok" if worst < 1e-3 else "FAIL"
    print(f"  {variant:8s} worst relative error {worst:.2e}   {verdict}")

print("\nthe full acceptance sweep runs 20 seeds per variant:")
print("  pytest tests/test_acceptance.py::test_gradient_correctness_all_variants -v")
