"""
When the counting bound is not enough
=====================================

For n=5 and cube lengths at most 3 the density bound allows k=3, but no
distinct tautology exists there. The solver proves it; the largest k is 2.
"""

from dnftaut import exact_k, max_k

r = max_k(5, 3)
for k, status in sorted(r.statuses.items(), reverse=True):
    print(f"k={k}: {status} in {r.runtimes[k]:.2f}s")
print("witness for k=2:")
print(r.witness)

# Cubes of one fixed length are a special case: here u = k.
for n, k in [(3, 1), (4, 2), (5, 3), (5, 2)]:
    print(f"exact length {k} on {n} variables: {exact_k(n, k).status.value}")
