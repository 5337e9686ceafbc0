"""Neural-network primitives, written out by hand.

Convolution follows the signal-processing definition

    G[m, n] = sum_j sum_k h[j, k] * f[m - j, n - k]

i.e. the kernel is flipped before the sliding dot product. Deep-learning
style cross-correlation is available by passing flip_kernel=False. Arrays
are channel-last: images (H, W, C), kernels (kh, kw, in_ch, out_ch).
"""

from __future__ import annotations

import numpy as np


def _pad_same(x: np.ndarray, kh: int, kw: int) -> tuple[np.ndarray, int, int]:
    # "same" output needs a true center pixel, hence odd kernel dims only
    if kh % 2 == 0 or kw % 2 == 0:
        raise ValueError("'same' padding requires odd kernel dimensions")
    ph, pw = (kh - 1) // 2, (kw - 1) // 2
    return np.pad(x, ((ph, ph), (pw, pw), (0, 0))), ph, pw


def _check_stride(stride: int) -> None:
    if not isinstance(stride, int) or stride < 1:
        raise ValueError("stride must be a positive integer")


def _cross_correlate(x: np.ndarray, kernels: np.ndarray, padding: str) -> np.ndarray:
    kh, kw, cin, _ = kernels.shape
    if x.ndim != 3 or x.shape[2] != cin:
        raise ValueError(f"input (H, W, {cin}) expected, got {x.shape}")
    if padding == "same":
        x, _, _ = _pad_same(x, kh, kw)
    elif padding != "valid":
        raise ValueError("padding must be 'same' or 'valid'")
    out_h = x.shape[0] - kh + 1
    out_w = x.shape[1] - kw + 1
    if out_h <= 0 or out_w <= 0:
        raise ValueError("kernel larger than input")
    out = np.zeros((out_h, out_w, kernels.shape[3]))
    for j in range(kh):
        for k in range(kw):
            out += x[j : j + out_h, k : k + out_w, :] @ kernels[j, k]
    return out


def conv2d(
    x: np.ndarray,
    kernels: np.ndarray,
    bias: np.ndarray | None = None,
    *,
    padding: str = "same",
    stride: int = 1,
    flip_kernel: bool = True,
) -> np.ndarray:
    """2-D convolution over a channel-last image.

    Stride subsamples the dense result, so output positions sit at stride
    multiples of the stride-1 grid under either padding mode.
    """
    _check_stride(stride)
    effective = kernels[::-1, ::-1] if flip_kernel else kernels
    out = _cross_correlate(x, effective, padding)
    if stride > 1:
        out = out[::stride, ::stride]
    if bias is not None:
        out = out + bias
    return out


def conv2d_backward(
    grad_out: np.ndarray,
    x: np.ndarray,
    kernels: np.ndarray,
    *,
    padding: str = "same",
    stride: int = 1,
    flip_kernel: bool = True,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gradients of conv2d w.r.t. input, kernels, and bias."""
    _check_stride(stride)
    effective = kernels[::-1, ::-1] if flip_kernel else kernels
    kh, kw, _, _ = effective.shape
    if padding == "same":
        xp, ph, pw = _pad_same(x, kh, kw)
    else:
        ph, pw = 0, 0
        xp = x
    out_h = xp.shape[0] - kh + 1
    out_w = xp.shape[1] - kw + 1
    if stride > 1:
        # scatter the strided gradient back onto the dense output grid
        dense = np.zeros((out_h, out_w, grad_out.shape[2]))
        dense[::stride, ::stride] = grad_out
        grad_out = dense
    grad_xp = np.zeros_like(xp)
    grad_k = np.zeros_like(effective)
    for j in range(kh):
        for k in range(kw):
            patch = xp[j : j + out_h, k : k + out_w, :]
            grad_k[j, k] = np.einsum("hwc,hwo->co", patch, grad_out)
            grad_xp[j : j + out_h, k : k + out_w, :] += grad_out @ effective[j, k].T
    grad_x = grad_xp[ph : ph + x.shape[0], pw : pw + x.shape[1], :]
    if flip_kernel:
        grad_k = grad_k[::-1, ::-1]
    return grad_x, grad_k, grad_out.sum(axis=(0, 1))


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def relu_backward(grad_out: np.ndarray, x: np.ndarray) -> np.ndarray:
    return grad_out * (x > 0.0)


def maxpool2(x: np.ndarray) -> np.ndarray:
    """2x2 max pooling with stride 2 over (H, W, C); H and W must be even."""
    h, w, c = x.shape
    if h % 2 or w % 2:
        raise ValueError("maxpool2 needs even spatial dimensions")
    blocks = x.reshape(h // 2, 2, w // 2, 2, c)
    return blocks.max(axis=(1, 3))


def maxpool2_backward(grad_out: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Route each pooled gradient to the first maximum of its 2x2 block."""
    h, w, c = x.shape
    blocks = x.reshape(h // 2, 2, w // 2, 2, c).transpose(0, 2, 4, 1, 3).reshape(
        h // 2, w // 2, c, 4
    )
    winners = blocks.argmax(axis=-1)
    grad_blocks = np.zeros_like(blocks)
    np.put_along_axis(grad_blocks, winners[..., None], grad_out[..., None], axis=-1)
    return (
        grad_blocks.reshape(h // 2, w // 2, c, 2, 2)
        .transpose(0, 3, 1, 4, 2)
        .reshape(h, w, c)
    )


def dense(x: np.ndarray, weights: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Affine map y = W x + b for a vector x; W is (out, in)."""
    return weights @ x + bias


def dense_backward(
    grad_out: np.ndarray, x: np.ndarray, weights: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return weights.T @ grad_out, np.outer(grad_out, x), grad_out.copy()


def residual_dense(
    x: np.ndarray,
    w1: np.ndarray,
    b1: np.ndarray,
    w2: np.ndarray,
    b2: np.ndarray,
) -> np.ndarray:
    """Residual block H(x) = W2 relu(W1 x + b1) + b2 + x.

    The shortcut is the identity, so W2 must map back to x's dimension and
    there is no activation after the addition.
    """
    if w2.shape[0] != x.shape[0]:
        raise ValueError("residual output must match input dimension")
    return w2 @ relu(w1 @ x + b1) + b2 + x


def residual_dense_backward(
    grad_out: np.ndarray,
    x: np.ndarray,
    w1: np.ndarray,
    b1: np.ndarray,
    w2: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Gradients (dx, dW1, db1, dW2, db2) of the residual block."""
    pre = w1 @ x + b1
    hidden = relu(pre)
    grad_hidden = relu_backward(w2.T @ grad_out, pre)
    grad_x = w1.T @ grad_hidden + grad_out
    return (
        grad_x,
        np.outer(grad_hidden, x),
        grad_hidden.copy(),
        np.outer(grad_out, hidden),
        grad_out.copy(),
    )


def softmax(logits: np.ndarray) -> np.ndarray:
    """Probability vector; shifts by the max so large logits cannot overflow."""
    shifted = logits - logits.max()
    exps = np.exp(shifted)
    return exps / exps.sum()


def cross_entropy(probs: np.ndarray, target: int) -> float:
    return float(-np.log(max(float(probs[target]), 1e-12)))


def softmax_cross_entropy_grad(probs: np.ndarray, target: int) -> np.ndarray:
    """d(cross_entropy(softmax(z), target)) / dz, the classic p - y form."""
    grad = probs.copy()
    grad[target] -= 1.0
    return grad
