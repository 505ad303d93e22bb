# Constant-product swap mathematics: output curve, concavity, and the
# analytic marginal that the profit optimizer drives to its target.

from dexarb import SwapLeg, path_marginal, path_out, swap_out

# A single pool holding 1000 of each token with the standard 0.3% fee.
leg = SwapLeg(reserve_in=1000.0, reserve_out=1000.0, fee_rate=0.003)

print("single swap on a balanced 1000/1000 pool, fee 0.3%")
for dx in (1.0, 10.0, 100.0, 1000.0):
    dy = swap_out(leg, dx)
    print(f"  pay {dx:8.1f}  ->  receive {dy:10.4f}   (average rate {dy/dx:.4f})")

# The output is concave: each extra unit of input buys less than the one
# before.  The marginal (derivative) starts at the spot rate and decreases.
print("\nmarginal output along the same pool")
for dx in (0.0, 100.0, 500.0, 2000.0):
    print(f"  at input {dx:8.1f}  marginal = {path_marginal([leg], dx):.6f}")

# Composing pools multiplies the marginals.  A three-pool route whose spot
# rates multiply to 1.05 turns a tiny input into 5% more of the start token.
route = [
    SwapLeg(100_000.0, 105_000.0, 0.0),
    SwapLeg(100_000.0, 100_000.0, 0.0),
    SwapLeg(100_000.0, 100_000.0, 0.0),
]
print("\nthree-pool route with spot-rate product 1.05 (no fees)")
print(f"  marginal at zero input : {path_marginal(route, 0.0):.6f}")
for dx in (1.0, 100.0, 2000.0, 10_000.0):
    out = path_out(route, dx)
    print(f"  pay {dx:8.1f}  ->  {out:10.2f}  (profit {out - dx:+10.2f})")
print("  profit rises, peaks, then falls: the optimizer finds the peak.")
