"""Linear quantum system records and dynamic-squeezer builders.

A system is a state-space record (F, G, H, K) of doubled matrices acting on a
single cavity mode, optionally with an estimand row C selecting the scalar to
be estimated. Input and output field channels are partitioned into named
groups (noise first), which is how the estimation layer extracts the blocks it
needs to wire a plant to a coherent controller.

Builders cover the dynamic optical squeezer family

    da = -gamma/2 a dt - chi a* dt - sum_i sqrt(kappa_i) dA_i,

which is annihilation-operator-only (passive cavity) exactly when chi = 0,
and physically realizable exactly when gamma equals the sum of the coupling
rates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import as_complex_matrix
from .doubled import DoubledMatrix
from .errors import ConfigurationError, DimensionError, ParameterError
from .tolerances import STRUCTURE_TOL


@dataclass(frozen=True)
class SqueezerParams:
    """Cavity decay rate, per-channel couplings and complex squeezing strength."""

    gamma: float
    kappas: tuple[float, ...]
    chi: complex = 0.0

    def __post_init__(self):
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "kappas", tuple(float(k) for k in self.kappas))
        object.__setattr__(self, "chi", complex(self.chi))
        if not self.kappas:
            raise ParameterError("at least one coupling rate kappa is required")
        if any(k <= 0.0 for k in self.kappas):
            raise ParameterError(f"coupling rates must be positive, got {self.kappas}")

    @property
    def realizable_parameterization(self) -> bool:
        """Whether gamma = sum(kappas), the realizability condition for this family."""
        return abs(self.gamma - sum(self.kappas)) <= STRUCTURE_TOL


@dataclass(frozen=True)
class ChannelGroup:
    """A named contiguous run of field channels."""

    name: str
    start: int
    width: int

    @property
    def channels(self) -> range:
        return range(self.start, self.start + self.width)


@dataclass(frozen=True)
class QuantumSystem:
    """State-space record of a linear quantum system in doubled-up form.

    ``F`` is the 2n x 2n drift, ``G`` the 2n x 2m input matrix over all input
    channels, ``H`` the 2p x 2n output matrix over all output channels, and
    ``K`` the 2p x 2m feedthrough. ``C`` is the 1 x 2n estimand row (plants
    only). Channel groups record the input/output partition; the noise group
    always comes first.
    """

    n_modes: int
    F: DoubledMatrix
    G: DoubledMatrix
    H: DoubledMatrix
    K: DoubledMatrix
    C: np.ndarray | None
    input_groups: tuple[ChannelGroup, ...]
    output_groups: tuple[ChannelGroup, ...]

    def __post_init__(self):
        n = self.n_modes
        if self.F.block_shape != (n, n):
            raise DimensionError(f"drift block must be {n}x{n}, got {self.F.block_shape}")
        m = self.G.block_shape[1]
        p = self.H.block_shape[0]
        if self.G.block_shape != (n, m):
            raise DimensionError("input matrix rows must match the mode count")
        if self.H.block_shape[1] != n:
            raise DimensionError("output matrix columns must match the mode count")
        if self.K.block_shape != (p, m):
            raise DimensionError(
                f"feedthrough block must be {p}x{m}, got {self.K.block_shape}"
            )
        if sum(g.width for g in self.input_groups) != m:
            raise DimensionError("input groups must partition all input channels")
        if sum(g.width for g in self.output_groups) != p:
            raise DimensionError("output groups must partition all output channels")
        if self.C is not None:
            c = as_complex_matrix(self.C)
            if c.shape != (1, 2 * n):
                raise DimensionError(f"estimand row must be 1x{2 * n}, got {c.shape}")
            c.setflags(write=False)
            object.__setattr__(self, "C", c)

    @property
    def n_inputs(self) -> int:
        return self.G.block_shape[1]

    @property
    def n_outputs(self) -> int:
        return self.H.block_shape[0]

    @property
    def annihilation_only(self) -> bool:
        """True iff every "2" block is exactly zero (no squeezing anywhere)."""
        return all(
            not np.any(m.block2) for m in (self.F, self.G, self.H, self.K)
        )

    def _group(self, groups: tuple[ChannelGroup, ...], name: str) -> ChannelGroup:
        for g in groups:
            if g.name == name:
                return g
        raise ConfigurationError(
            f"no channel group named {name!r}; have {[g.name for g in groups]}"
        )

    def input_block(self, name: str) -> DoubledMatrix:
        """G restricted to one input channel group."""
        return self.G.cols(self._group(self.input_groups, name).channels)

    def output_block(self, name: str) -> DoubledMatrix:
        """H restricted to one output channel group."""
        return self.H.rows(self._group(self.output_groups, name).channels)

    def feedthrough_block(self, output_name: str, input_name: str) -> DoubledMatrix:
        return self.K.sub(
            self._group(self.output_groups, output_name).channels,
            self._group(self.input_groups, input_name).channels,
        )


def _squeezer_matrices(params: SqueezerParams):
    g = params.gamma
    chi = params.chi
    roots = [np.sqrt(k) for k in params.kappas]
    F = DoubledMatrix([[-g / 2.0]], [[-chi]])
    G = DoubledMatrix([[-r for r in roots]], [[0.0] * len(roots)])
    return F, G, roots


def build_squeezer_plant(params: SqueezerParams, c_row) -> QuantumSystem:
    """Single-input dynamic squeezer plant with estimand row ``c_row``."""
    if len(params.kappas) != 1:
        raise ParameterError(
            f"a plant without a control channel takes exactly one kappa, got {len(params.kappas)}"
        )
    F, G, roots = _squeezer_matrices(params)
    H = DoubledMatrix([[roots[0]]], [[0.0]])
    K = DoubledMatrix([[1.0]], [[0.0]])
    return QuantumSystem(
        n_modes=1,
        F=F,
        G=G,
        H=H,
        K=K,
        C=c_row,
        input_groups=(ChannelGroup("noise", 0, 1),),
        output_groups=(ChannelGroup("output", 0, 1),),
    )


def build_feedback_squeezer_plant(params: SqueezerParams, c_row) -> QuantumSystem:
    """Dynamic squeezer plant with a noise channel and a control channel.

    The output couples only through the noise channel: the feedthrough row is
    [I 0] over the (noise, control) partition.
    """
    if len(params.kappas) != 2:
        raise ParameterError(
            f"a feedback-capable plant takes exactly two kappas, got {len(params.kappas)}"
        )
    F, G, roots = _squeezer_matrices(params)
    H = DoubledMatrix([[roots[0]]], [[0.0]])
    K = DoubledMatrix([[1.0, 0.0]], [[0.0, 0.0]])
    return QuantumSystem(
        n_modes=1,
        F=F,
        G=G,
        H=H,
        K=K,
        C=c_row,
        input_groups=(ChannelGroup("noise", 0, 1), ChannelGroup("control", 1, 1)),
        output_groups=(ChannelGroup("output", 0, 1),),
    )


def build_squeezer_controller(params: SqueezerParams) -> QuantumSystem:
    """Coherent controller driven by the plant output; same squeezer family."""
    if len(params.kappas) != 1:
        raise ParameterError(
            f"a controller without feedback takes exactly one kappa, got {len(params.kappas)}"
        )
    F, G, roots = _squeezer_matrices(params)
    H = DoubledMatrix([[roots[0]]], [[0.0]])
    K = DoubledMatrix([[1.0]], [[0.0]])
    return QuantumSystem(
        n_modes=1,
        F=F,
        G=G,
        H=H,
        K=K,
        C=None,
        input_groups=(ChannelGroup("input", 0, 1),),
        output_groups=(ChannelGroup("detected", 0, 1),),
    )


def build_feedback_squeezer_controller(params: SqueezerParams) -> QuantumSystem:
    """Coherent feedback controller: inputs (noise, plant output Y), outputs (detected, fed-back U).

    The detected output carries the controller's own noise feedthrough and the
    fed-back output carries the plant output feedthrough, so the assembled
    feedthrough over channel space is the identity.
    """
    if len(params.kappas) != 2:
        raise ParameterError(
            f"a feedback controller takes exactly two kappas, got {len(params.kappas)}"
        )
    F, G, roots = _squeezer_matrices(params)
    H = DoubledMatrix([[roots[0]], [roots[1]]], [[0.0], [0.0]])
    K = DoubledMatrix(np.eye(2), np.zeros((2, 2)))
    return QuantumSystem(
        n_modes=1,
        F=F,
        G=G,
        H=H,
        K=K,
        C=None,
        input_groups=(ChannelGroup("noise", 0, 1), ChannelGroup("input", 1, 1)),
        output_groups=(ChannelGroup("detected", 0, 1), ChannelGroup("feedback", 1, 1)),
    )


def read_squeezer_params(system: QuantumSystem) -> SqueezerParams:
    """Recover (gamma, kappas, chi) from a built squeezer system."""
    if system.n_modes != 1:
        raise ParameterError("parameter read-back is defined for single-mode squeezers")
    gamma = -2.0 * float(system.F.block1[0, 0].real)
    chi = complex(-system.F.block2[0, 0])
    kappas = tuple(float((g.real) ** 2) for g in system.G.block1[0, :])
    return SqueezerParams(gamma=gamma, kappas=kappas, chi=chi)


def system_config_dict(params: SqueezerParams, c_row=None) -> dict:
    """JSON-serializable description: {gamma, kappas[], chi_re, chi_im, C_re[], C_im[]}."""
    out = {
        "gamma": params.gamma,
        "kappas": list(params.kappas),
        "chi_re": params.chi.real,
        "chi_im": params.chi.imag,
    }
    if c_row is not None:
        c = np.asarray(c_row, dtype=complex).ravel()
        out["C_re"] = [float(v) for v in c.real]
        out["C_im"] = [float(v) for v in c.imag]
    return out


def system_from_config_dict(data: dict) -> tuple[SqueezerParams, np.ndarray | None]:
    """Parse the JSON system description; returns params and the optional C row."""
    try:
        params = SqueezerParams(
            gamma=float(data["gamma"]),
            kappas=tuple(float(k) for k in data["kappas"]),
            chi=complex(float(data.get("chi_re", 0.0)), float(data.get("chi_im", 0.0))),
        )
    except KeyError as exc:
        raise ConfigurationError(f"system description is missing field {exc}") from exc
    c_row = None
    if "C_re" in data or "C_im" in data:
        c_re = np.asarray(data.get("C_re", []), dtype=float)
        c_im = np.asarray(data.get("C_im", np.zeros_like(c_re)), dtype=float)
        if c_re.shape != c_im.shape:
            raise ConfigurationError("C_re and C_im must have the same length")
        c_row = (c_re + 1j * c_im).reshape(1, -1)
    return params, c_row


def build_plant(params: SqueezerParams, c_row) -> QuantumSystem:
    """Dispatch on the kappa count: one coupling -> plain plant, two -> feedback-capable."""
    if len(params.kappas) == 1:
        return build_squeezer_plant(params, c_row)
    if len(params.kappas) == 2:
        return build_feedback_squeezer_plant(params, c_row)
    raise ParameterError(f"plants take one or two kappas, got {len(params.kappas)}")


def build_controller(params: SqueezerParams) -> QuantumSystem:
    """Dispatch on the kappa count: one coupling -> plain controller, two -> feedback."""
    if len(params.kappas) == 1:
        return build_squeezer_controller(params)
    if len(params.kappas) == 2:
        return build_feedback_squeezer_controller(params)
    raise ParameterError(f"controllers take one or two kappas, got {len(params.kappas)}")
