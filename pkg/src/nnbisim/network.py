"""Feedforward network data model with per-neuron activations.

Networks are sequences of affine layers; each neuron carries its own
activation tag (ReLU or identity), because merged difference networks mix
both within a single layer.
"""

import numpy as np

from .errors import ShapeError

RELU = "relu"
IDENTITY = "identity"


def _freeze(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


class Layer:
    """One affine layer: y = act(W x + b), activation applied per neuron.

    Attributes:
        weights (ndarray): shape (rows, cols)
        bias (ndarray): shape (rows,)
        activations (tuple of str): "relu" or "identity" per output neuron
        relu_mask (ndarray of bool): True where the neuron is ReLU
    """

    def __init__(self, weights, bias, activations):
        self.weights = _freeze(np.atleast_2d(weights))
        self.bias = _freeze(np.atleast_1d(bias))
        acts = tuple(activations)
        for a in acts:
            if a not in (RELU, IDENTITY):
                raise ValueError(f"unknown activation tag {a!r}")
        self.activations = acts
        mask = np.array([a == RELU for a in acts], dtype=bool)
        mask.flags.writeable = False
        self.relu_mask = mask

    @classmethod
    def relu(cls, weights, bias):
        weights = np.atleast_2d(weights)
        return cls(weights, bias, (RELU,) * weights.shape[0])

    @classmethod
    def linear(cls, weights, bias):
        weights = np.atleast_2d(weights)
        return cls(weights, bias, (IDENTITY,) * weights.shape[0])

    @property
    def rows(self):
        return self.weights.shape[0]

    @property
    def cols(self):
        return self.weights.shape[1]

    def apply(self, x):
        z = self.weights @ x + self.bias
        return np.where(self.relu_mask, np.maximum(z, 0.0), z)


class Network:
    """Feedforward network: input_dim plus an ordered list of layers.

    The last layer is the output layer. Immutable after construction;
    safe to share across threads.
    """

    def __init__(self, input_dim, layers):
        self.input_dim = int(input_dim)
        self.layers = tuple(layers)

    @property
    def output_dim(self):
        return self.layers[-1].rows

    @property
    def num_layers(self):
        return len(self.layers)

    def layer_sizes(self):
        """[input_dim, width of layer 1, ..., width of output layer]."""
        return [self.input_dim] + [lay.rows for lay in self.layers]

    def forward(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.input_dim,):
            raise ShapeError(
                f"input has shape {x.shape}, expected ({self.input_dim},)")
        for lay in self.layers:
            x = lay.apply(x)
        return x

    def forward_batch(self, X):
        """Evaluate a batch of inputs, rows = samples. Returns (n, out_dim)."""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.input_dim:
            raise ShapeError(
                f"batch has shape {X.shape}, expected (n, {self.input_dim})")
        for lay in self.layers:
            Z = X @ lay.weights.T + lay.bias
            X = np.where(lay.relu_mask, np.maximum(Z, 0.0), Z)
        return X

    def parameter_count(self):
        return sum(lay.weights.size + lay.bias.size for lay in self.layers)


class Box:
    """Axis-aligned interval vector: {x : lower <= x <= upper}."""

    def __init__(self, lower, upper):
        self.lower = _freeze(np.atleast_1d(lower))
        self.upper = _freeze(np.atleast_1d(upper))
        if self.lower.shape != self.upper.shape:
            raise ShapeError("box bounds have different lengths")
        if np.any(self.lower > self.upper):
            raise ValueError("box has lower > upper")

    def __len__(self):
        return self.lower.shape[0]

    def center(self):
        return (self.lower + self.upper) / 2.0

    def contains(self, x, tol=0.0):
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def sample(self, rng, n):
        """n uniform points, rows = samples."""
        return rng.uniform(self.lower, self.upper, size=(n, len(self)))

    def __repr__(self):
        return f"Box({self.lower.tolist()}, {self.upper.tolist()})"


def validate(net):
    """Check Network invariants; returns a list of violation strings.

    Empty list means the network is well-formed.
    """
    violations = []
    if net.input_dim < 1:
        violations.append("input_dim must be positive")
    if len(net.layers) < 1:
        violations.append("network must have at least one layer")
        return violations
    prev = net.input_dim
    for k, lay in enumerate(net.layers):
        if lay.cols != prev:
            violations.append(
                f"layer {k}: weight cols {lay.cols} != preceding width {prev}")
        if lay.bias.shape[0] != lay.rows:
            violations.append(
                f"layer {k}: bias length {lay.bias.shape[0]} != rows {lay.rows}")
        if len(lay.activations) != lay.rows:
            violations.append(
                f"layer {k}: {len(lay.activations)} activation tags != rows {lay.rows}")
        prev = lay.rows
    return violations


def random_network(layer_sizes, weight_range, seed):
    """Uniform random network: hidden layers ReLU, output layer identity.

    Deterministic for a fixed seed. Weights and biases are drawn uniformly
    from [-weight_range, weight_range].
    """
    sizes = [int(s) for s in layer_sizes]
    if len(sizes) < 2:
        raise ValueError("layer_sizes needs at least an input and output size")
    if any(s < 1 for s in sizes):
        raise ValueError("layer sizes must be positive")
    if weight_range <= 0:
        raise ValueError("weight_range must be positive")
    rng = np.random.default_rng(seed)
    layers = []
    for k in range(1, len(sizes)):
        W = rng.uniform(-weight_range, weight_range, size=(sizes[k], sizes[k - 1]))
        b = rng.uniform(-weight_range, weight_range, size=sizes[k])
        if k == len(sizes) - 1:
            layers.append(Layer.linear(W, b))
        else:
            layers.append(Layer.relu(W, b))
    return Network(sizes[0], layers)
