"""
Lattice operators annihilating a closed series
==============================================

"""

from qcseries import toda3
from qcseries.exactalg import RatFunc

# a two-index table of exact rationals: closed_a(i, j) = (i+j)!/(i!^3 j!^3)
for i in range(3):
    row = "  ".join(str(toda3.closed_a(i, j)) for j in range(3))
    print(f"closed row i={i}:  {row}")

# the same table arrives from a binomial double sum
assert all(
    toda3.batyrev_b(i, j) == toda3.closed_a(i, j) for i in range(5) for j in range(5)
)
print("binomial-sum table equals the closed table, i,j <= 4")

# build the pair of lattice operators in both flavors
plain2, plain3 = toda3.build_operators(equivariant=False)
eq2, eq3 = toda3.build_operators(equivariant=True)

# applying an operator to a truncated series returns a shorter certified
# truncation; the closed solution is killed identically
series = toda3.closed_solution(6, equivariant=False)
for label, op in (("second", plain2), ("third", plain3)):
    image = toda3.apply(op, series)
    print(f"plain {label} operator image is zero: {image.is_zero}",
          f"(certified through order {image.order})")

# negative control: the constant series is NOT annihilated
ones = toda3.BiSeries(toda3.LAMBDA_REGISTRY, 2, {(0, 0): RatFunc.one(toda3.LAMBDA_REGISTRY)})
moved = toda3.apply(plain2, ones)
print("control image coefficients:",
      moved.coefficient(1, 0).text(), "and", moved.coefficient(0, 1).text())

# the equivariant closed solution specializes to the plain one at
# lambda = 0, h = 1, and the equivariant operators kill it as well
flat = {"lambda_0": 0, "lambda_1": 0, "lambda_2": 0, "h": 1}
eq_series = toda3.closed_solution(4, equivariant=True)
assert toda3.apply(eq2, eq_series).is_zero
assert toda3.apply(eq3, eq_series).is_zero
specialized = eq_series.substitute(flat)
assert all(
    specialized.coefficient(i, j) == toda3.closed_solution(4, False).coefficient(i, j)
    for i in range(5)
    for j in range(5 - i)
)
print("equivariant solution: annihilated, and specializes to the plain table")

# the same closed table, rescaled, is what the rank-two flag solver builds
print(toda3.verify_corollary_3_5(3).render())
