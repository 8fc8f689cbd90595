# A CMV matrix, its eigenvector recurrence and the moments it generates.
import numpy as np

from cgmvwalk.cmv import VerblunskySeq, build_cmv, cmv_power_entry, unitarity_residual
from cgmvwalk.opuc import eigen_residual, laurent_basis, verblunsky_from_moments

np.set_printoptions(precision=4, suppress=True, linewidth=110)

# null-odd pattern: (a, 0, a, 0, ...)
seq = VerblunskySeq.null_odd(0.5)
C = build_cmv(seq, 12)
print(C.dense()[:6, :6].real)
print("interior unitarity residual:", unitarity_residual(build_cmv(seq, 64)))

# five-diagonal storage, the band holds everything
M = C.dense()
i, j = np.indices(M.shape)
print("entries outside the band:", np.count_nonzero(M[np.abs(i - j) > 2]))

# right eigenvectors C x = z x, written as Laurent polynomials
basis = laurent_basis(seq, 6)
for n, p in enumerate(basis.polys):
    terms = " + ".join(f"({c.real:.4f})z^{k}" for k, c in p.as_dict().items())
    print(f"x_{n}(z) = {terms}")

z = np.exp(0.7j)
print("eigen residual at e^{0.7i}:", eigen_residual(build_cmv(seq, 64), laurent_basis(seq, 32), z, 20))

# (C^t)_00 are the moments of the spectral measure; the Szego recursion gives back the sequence
big = build_cmv(seq, 48)
moments = [cmv_power_entry(big, t, 0, 0) for t in range(9)]
print("moments:", np.round(moments, 6))
print("recovered alphas:", np.round(verblunsky_from_moments(moments), 10))
