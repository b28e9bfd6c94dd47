"""Pure numpy versions of the pairwise Kelvin kernels.

Same signatures and outputs as the compiled ``_kernels`` module.  Pairs with
coincident points contribute zero; self-interaction corrections live in
``lametrans.potentials``.  Matrices use interleaved components: row ``2i+a``,
column ``2j+b``.
"""

import numpy as np

_CHUNK = 1 << 21  # pairs per block


def _consts(lam, mu):
    alpha = 0.5 * (1.0 / mu + 1.0 / (2.0 * mu + lam))
    beta = 0.5 * (1.0 / mu - 1.0 / (2.0 * mu + lam))
    return alpha / (2 * np.pi), beta / (2 * np.pi)


def _diffs(tgt, src):
    r0 = tgt[:, 0, None] - src[None, :, 0]
    r1 = tgt[:, 1, None] - src[None, :, 1]
    r2 = r0 * r0 + r1 * r1
    zero = r2 == 0.0
    r2 = np.where(zero, 1.0, r2)
    return r0, r1, r2, zero


def _interleave(blocks, m, n):
    out = np.empty((2 * m, 2 * n))
    out[0::2, 0::2] = blocks[0][0]
    out[0::2, 1::2] = blocks[0][1]
    out[1::2, 0::2] = blocks[1][0]
    out[1::2, 1::2] = blocks[1][1]
    return out


def single_layer_matrix(lam, mu, tgt, src, w):
    a, b = _consts(lam, mu)
    r0, r1, r2, zero = _diffs(tgt, src)
    lg = a * 0.5 * np.log(r2)
    s = np.where(zero, 0.0, w[None, :] / r2)
    lw = np.where(zero, 0.0, lg * w[None, :])
    g00 = lw - b * r0 * r0 * s
    g01 = -b * r0 * r1 * s
    g11 = lw - b * r1 * r1 * s
    return _interleave(((g00, g01), (g01, g11)), len(tgt), len(src))


def _traction_blocks(lam, mu, r0, r1, r2, n0, n1):
    c0 = mu / (2 * np.pi * (2 * mu + lam))
    c1 = (mu + lam) / (np.pi * (2 * mu + lam))
    rn = (r0 * n0 + r1 * n1) / r2
    cr = (r0 * n1 - r1 * n0) / r2
    q = c1 * rn / r2
    t00 = c0 * rn + q * r0 * r0
    t11 = c0 * rn + q * r1 * r1
    t01 = c0 * cr + q * r0 * r1
    t10 = -c0 * cr + q * r0 * r1
    return t00, t01, t10, t11


def traction_matrix(lam, mu, tgt, tnrm, src, w):
    """Traction at target normals of the columns of Gamma(x - y), times w(y)."""
    r0, r1, r2, zero = _diffs(tgt, src)
    t00, t01, t10, t11 = _traction_blocks(
        lam, mu, r0, r1, r2, tnrm[:, 0, None], tnrm[:, 1, None]
    )
    ww = np.where(zero, 0.0, w[None, :])
    return _interleave(((t00 * ww, t01 * ww), (t10 * ww, t11 * ww)), len(tgt), len(src))


def double_layer_matrix(lam, mu, tgt, src, snrm, w):
    """Entries ``T(y - x, n_y)^T w(y)`` of the elastic double layer."""
    r0, r1, r2, zero = _diffs(tgt, src)
    t00, t01, t10, t11 = _traction_blocks(
        lam, mu, -r0, -r1, r2, snrm[None, :, 0], snrm[None, :, 1]
    )
    ww = np.where(zero, 0.0, w[None, :])
    return _interleave(((t00 * ww, t10 * ww), (t01 * ww, t11 * ww)), len(tgt), len(src))


def single_layer_apply(lam, mu, tgt, src, wphi, with_grad):
    """Values (M, 2) and optionally gradients (M, 2, 2) of sum_j Gamma(x - y_j) wphi_j."""
    a, b = _consts(lam, mu)
    m = len(tgt)
    vals = np.zeros((m, 2))
    grads = np.zeros((m, 2, 2)) if with_grad else None
    step = max(1, _CHUNK // max(1, len(src)))
    for s in range(0, m, step):
        r0, r1, r2, zero = _diffs(tgt[s : s + step], src)
        inv = np.where(zero, 0.0, 1.0 / r2)
        f0, f1 = wphi[None, :, 0], wphi[None, :, 1]
        lg = np.where(zero, 0.0, a * 0.5 * np.log(r2))
        rf = (r0 * f0 + r1 * f1) * inv
        vals[s : s + step, 0] = np.sum(lg * f0 - b * r0 * rf, axis=1)
        vals[s : s + step, 1] = np.sum(lg * f1 - b * r1 * rf, axis=1)
        if with_grad:
            # d_m sum_k G_ik f_k = a f_i r_m/r2 - b[(d_im r.f + r_i f_m)/r2 - 2 r_i (r.f) r_m/r4]
            r = (r0, r1)
            f = (f0, f1)
            for i in range(2):
                for mm in range(2):
                    term = a * f[i] * r[mm] * inv - b * (
                        (rf if i == mm else 0.0) + r[i] * f[mm] * inv - 2.0 * r[i] * rf * r[mm] * inv
                    )
                    grads[s : s + step, i, mm] = np.sum(term, axis=1)
    return vals, grads
