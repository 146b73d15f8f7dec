"""
Bit-packed stabilizer tableau (Aaronson-Gottesman layout).

Rows 0..n-1 are destabilizers, rows n..2n-1 stabilizers. Storage is
column-major: ``x[q]`` and ``z[q]`` are words packing bit q of every row,
so a gate on qubit q is a handful of word-wide AND/XOR sweeps.
"""
import logging
from typing import Iterable, List, Sequence

import numpy as np

from cliffvar.circuits.gates import CliffordGate, GateKind
from cliffvar.errors import TableauError
from cliffvar.stabilizer.pauli import PauliString

logger = logging.getLogger(__name__)

_WORD_BITS = 64
_DTYPE = np.dtype("<u8")
_ONE = np.uint64(1)

_SINGLE_QUBIT_UPDATES = {
    GateKind.X: "_x",
    GateKind.Y: "_y",
    GateKind.Z: "_z",
    GateKind.H: "_h",
    GateKind.S: "_s",
    GateKind.SDG: "_sdg",
}
_TWO_QUBIT_UPDATES = {
    GateKind.CZ: "_cz",
    GateKind.CNOT: "_cnot",
    GateKind.CNOT_X: "_cnot_x",
}


def _phase_exponents(x1, z1, x2, z2):
    """Power of i picked up when multiplying Pauli (x1,z1) by (x2,z2)."""
    x1 = np.asarray(x1, dtype=np.int64)
    z1 = np.asarray(z1, dtype=np.int64)
    x2 = np.asarray(x2, dtype=np.int64)
    z2 = np.asarray(z2, dtype=np.int64)
    y = x1 & z1
    x_only = x1 & (1 - z1)
    z_only = (1 - x1) & z1
    return y * (z2 - x2) + x_only * z2 * (2 * x2 - 1) + z_only * x2 * (1 - 2 * z2)


class StabilizerTableau:
    """Stabilizer state on n qubits, initialized to |0...0>."""

    def __init__(self, n: int):
        if n < 1:
            raise TableauError(f"Tableau needs at least one qubit, got {n}")
        self.n = n
        self.rows = 2 * n
        self.words = -(-self.rows // _WORD_BITS)
        self.x = np.zeros((n, self.words), dtype=_DTYPE)
        self.z = np.zeros((n, self.words), dtype=_DTYPE)
        self.r = np.zeros(self.words, dtype=_DTYPE)
        stabilizer_rows = np.zeros(self.rows, dtype=bool)
        stabilizer_rows[n:] = True
        self._stabilizer_mask = self._pack(stabilizer_rows)
        for q in range(n):
            self._set_bit(self.x, q, q)
            self._set_bit(self.z, q, n + q)

    # ------------------------------------------------------------------
    # bit plumbing
    # ------------------------------------------------------------------
    @staticmethod
    def _set_bit(array: np.ndarray, q: int, row: int) -> None:
        word, bit = divmod(row, _WORD_BITS)
        array[q, word] |= _ONE << np.uint64(bit)

    def _pack(self, bits: np.ndarray) -> np.ndarray:
        buffer = np.zeros(self.words * 8, dtype=np.uint8)
        packed = np.packbits(bits.astype(np.uint8), bitorder="little")
        buffer[: packed.size] = packed
        return buffer.view(_DTYPE)

    def _unpack(self, words: np.ndarray) -> np.ndarray:
        """Row bits of a (W,) or (k, W) word array as bool of shape (rows,) / (k, rows)."""
        words = np.ascontiguousarray(words, dtype=_DTYPE)
        bits = np.unpackbits(words.view(np.uint8), axis=-1, bitorder="little")
        return bits[..., : self.rows].astype(bool)

    def _row_bits(self, rows: np.ndarray):
        """X bits, Z bits (shape (len(rows), n)) and sign bits of selected rows."""
        rows = np.asarray(rows, dtype=np.int64)
        word = rows // _WORD_BITS
        shift = (rows % _WORD_BITS).astype(np.uint64)
        xs = ((self.x[:, word] >> shift) & _ONE).astype(np.uint8).T
        zs = ((self.z[:, word] >> shift) & _ONE).astype(np.uint8).T
        rs = ((self.r[word] >> shift) & _ONE).astype(np.uint8)
        return xs, zs, rs

    def _write_row(self, row: int, xs: np.ndarray, zs: np.ndarray, sign: int) -> None:
        word, bit = divmod(row, _WORD_BITS)
        one = _ONE << np.uint64(bit)
        xs = np.asarray(xs, dtype=bool)
        zs = np.asarray(zs, dtype=bool)
        self.x[:, word] = np.where(xs, self.x[:, word] | one, self.x[:, word] & ~one)
        self.z[:, word] = np.where(zs, self.z[:, word] | one, self.z[:, word] & ~one)
        self.r[word] = (self.r[word] | one) if sign else (self.r[word] & ~one)

    def _check_qubit(self, q: int) -> None:
        if not 0 <= q < self.n:
            raise TableauError(f"Qubit index {q} out of range for {self.n}-qubit tableau")

    # ------------------------------------------------------------------
    # gate updates
    # ------------------------------------------------------------------
    def _h(self, q: int) -> None:
        self.r ^= self.x[q] & self.z[q]
        self.x[q], self.z[q] = self.z[q].copy(), self.x[q].copy()

    def _s(self, q: int) -> None:
        self.r ^= self.x[q] & self.z[q]
        self.z[q] ^= self.x[q]

    def _sdg(self, q: int) -> None:
        self.r ^= self.x[q] & ~self.z[q]
        self.z[q] ^= self.x[q]

    def _x(self, q: int) -> None:
        self.r ^= self.z[q]

    def _z(self, q: int) -> None:
        self.r ^= self.x[q]

    def _y(self, q: int) -> None:
        self.r ^= self.x[q] ^ self.z[q]

    def _cnot(self, c: int, t: int) -> None:
        self.r ^= self.x[c] & self.z[t] & ~(self.x[t] ^ self.z[c])
        self.x[t] ^= self.x[c]
        self.z[c] ^= self.z[t]

    def _cz(self, c: int, t: int) -> None:
        self.r ^= self.x[c] & self.x[t] & (self.z[c] ^ self.z[t])
        self.z[c] ^= self.x[t]
        self.z[t] ^= self.x[c]

    def _cnot_x(self, c: int, t: int) -> None:
        # (X (x) X) CNOT (X (x) X): control on |0>
        self._x(c)
        self._x(t)
        self._cnot(c, t)
        self._x(c)
        self._x(t)

    def apply_gate(self, gate: CliffordGate) -> None:
        """Apply a Clifford gate in place."""
        self._check_qubit(gate.target)
        if gate.control is not None:
            self._check_qubit(gate.control)
        if gate.kind is GateKind.I:
            return
        if gate.kind.is_two_qubit:
            getattr(self, _TWO_QUBIT_UPDATES[gate.kind])(gate.control, gate.target)
        else:
            getattr(self, _SINGLE_QUBIT_UPDATES[gate.kind])(gate.target)

    def apply_gates(self, gates: Iterable[CliffordGate]) -> "StabilizerTableau":
        for g in gates:
            self.apply_gate(g)
        return self

    # ------------------------------------------------------------------
    # queries
    # ------------------------------------------------------------------
    def _product_phase(self, rows: np.ndarray):
        """X bits, Z bits and i-exponent (mod 4) of the ordered product of rows."""
        xs, zs, rs = self._row_bits(rows)
        if len(rows) == 0:
            return np.zeros(self.n, np.uint8), np.zeros(self.n, np.uint8), 0
        acc_x = np.bitwise_xor.accumulate(xs, axis=0)
        acc_z = np.bitwise_xor.accumulate(zs, axis=0)
        prev_x = np.vstack([np.zeros((1, self.n), np.uint8), acc_x[:-1]])
        prev_z = np.vstack([np.zeros((1, self.n), np.uint8), acc_z[:-1]])
        g = int(_phase_exponents(prev_x, prev_z, xs, zs).sum())
        phase = (2 * int(rs.sum()) + g) % 4
        return acc_x[-1], acc_z[-1], phase

    def _anticommuting_rows(self, xs: np.ndarray, zs: np.ndarray) -> np.ndarray:
        acc = np.zeros(self.words, dtype=_DTYPE)
        if xs.any():
            acc ^= np.bitwise_xor.reduce(self.z[xs], axis=0)
        if zs.any():
            acc ^= np.bitwise_xor.reduce(self.x[zs], axis=0)
        return self._unpack(acc)

    def pauli_expectation(self, pauli: PauliString) -> int:
        """<psi|P|psi> in {-1, 0, +1}."""
        if pauli.n != self.n:
            raise TableauError(f"Pauli string on {pauli.n} qubits, tableau has {self.n}")
        anti = self._anticommuting_rows(pauli.x, pauli.z)
        if anti[self.n:].any():
            return 0
        # P = +/- product of stabilizers paired with anticommuting destabilizers
        generators = np.flatnonzero(anti[: self.n]) + self.n
        _, _, phase = self._product_phase(generators)
        if phase % 2:
            raise TableauError("Stabilizer product acquired an imaginary phase")
        return pauli.sign * (1 if phase == 0 else -1)

    def _deterministic_z_sign(self, q: int) -> int:
        """Sign of Z_q in the stabilizer group when it commutes with every stabilizer."""
        destab = self._unpack(self.x[q])[: self.n]
        generators = np.flatnonzero(destab) + self.n
        _, _, phase = self._product_phase(generators)
        return 1 if phase == 0 else -1

    def _rowsum_into(self, targets: np.ndarray, source: int) -> None:
        """Multiply every target row (bool mask over rows) by row ``source``."""
        src_x, src_z, src_r = self._row_bits(np.array([source]))
        src_x, src_z, src_r = src_x[0].astype(bool), src_z[0].astype(bool), int(src_r[0])
        cols = np.flatnonzero(src_x | src_z)
        if cols.size:
            row_x = self._unpack(self.x[cols])
            row_z = self._unpack(self.z[cols])
            g = _phase_exponents(src_x[cols][:, None], src_z[cols][:, None], row_x, row_z).sum(axis=0)
        else:
            g = np.zeros(self.rows, dtype=np.int64)
        r_bits = self._unpack(self.r).astype(np.int64)
        new_r = ((2 * r_bits + 2 * src_r + g) % 4) // 2
        r_bits = np.where(targets, new_r, r_bits)
        self.r = self._pack(r_bits.astype(bool))
        mask = self._pack(targets)
        if src_x.any():
            self.x[src_x] ^= mask
        if src_z.any():
            self.z[src_z] ^= mask

    def _collapse_to_zero(self, q: int, pivot: int) -> None:
        """Post-select outcome 0 for a random Z_q measurement with pivot stabilizer row."""
        targets = self._unpack(self.x[q])
        targets[pivot] = False
        if targets.any():
            self._rowsum_into(targets, pivot)
        xs, zs, rs = self._row_bits(np.array([pivot]))
        self._write_row(pivot - self.n, xs[0], zs[0], int(rs[0]))
        z_row = np.zeros(self.n, dtype=bool)
        z_row[q] = True
        self._write_row(pivot, np.zeros(self.n, dtype=bool), z_row, 0)

    def zero_projector_probability(self, support: Sequence[int]) -> float:
        """Probability of reading 0 on every qubit in support. Non-destructive."""
        support = list(support)
        if not support:
            raise TableauError("Projector support must be nonempty")
        for q in support:
            self._check_qubit(q)
        work = self.copy()
        probability = 1.0
        for q in support:
            random_rows = work.x[q] & work._stabilizer_mask
            if random_rows.any():
                pivot = int(np.flatnonzero(work._unpack(random_rows))[0])
                probability *= 0.5
                work._collapse_to_zero(q, pivot)
            elif work._deterministic_z_sign(q) < 0:
                return 0.0
        return probability

    # ------------------------------------------------------------------
    # utilities
    # ------------------------------------------------------------------
    def copy(self) -> "StabilizerTableau":
        clone = StabilizerTableau.__new__(StabilizerTableau)
        clone.n, clone.rows, clone.words = self.n, self.rows, self.words
        clone.x, clone.z, clone.r = self.x.copy(), self.z.copy(), self.r.copy()
        clone._stabilizer_mask = self._stabilizer_mask
        return clone

    def symplectic_matrix(self) -> np.ndarray:
        """Rows as length-2n binary vectors [x | z]."""
        xs = self._unpack(self.x).T
        zs = self._unpack(self.z).T
        return np.hstack([xs, zs]).astype(np.int64)

    def check_invariants(self) -> bool:
        """True iff rows pair up symplectically (destab_i anticommutes only with stab_i)."""
        m = self.symplectic_matrix()
        xs, zs = m[:, : self.n], m[:, self.n:]
        form = (xs @ zs.T + zs @ xs.T) % 2
        expected = np.zeros((self.rows, self.rows), dtype=np.int64)
        expected[: self.n, self.n:] = np.eye(self.n, dtype=np.int64)
        expected[self.n:, : self.n] = np.eye(self.n, dtype=np.int64)
        return bool(np.array_equal(form, expected))

    def stabilizers(self) -> List[str]:
        """Stabilizer generators as signed labels, e.g. ['+XX', '+ZZ']."""
        xs, zs, rs = self._row_bits(np.arange(self.n, self.rows))
        labels = []
        for row_x, row_z, sign in zip(xs, zs, rs):
            body = "".join("IXZY"[int(a) + 2 * int(b)] for a, b in zip(row_x, row_z))
            labels.append(("-" if sign else "+") + body)
        return labels


def run_circuit(gates: Iterable[CliffordGate], n: int) -> StabilizerTableau:
    """Tableau obtained by applying gates to |0...0> in order."""
    return StabilizerTableau(n).apply_gates(gates)
