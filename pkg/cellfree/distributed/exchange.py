#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""Monodirectional ring exchange of hatted cross-term tables.

BS ``b`` receives from ``b + 1`` and sends to ``b - 1`` (indices mod B).
With ``c_b^l`` the contribution of BS ``b`` formed with its block-``l``
variables, the tables evolve as

  outgoing   x_b^l     = x_{b+1}^{l-1} + c_b^l                (l <= B)
                       = x_{b+1}^{l-1} - c_b^{l-B} + c_b^l    (l >  B)
  used       u_b^{l+1} = x_{b+1}^l + c_b^l                    (l <  B)
                       = x_{b+1}^l - c_b^{l-B+1} + c_b^l      (l >= B)

so that every used table from block ``B + 1`` on holds exactly one,
freshest available, contribution of every BS.
"""
from collections import deque

import numpy as np
from cellfree.optimization.objective import CrossTermTable, local_contribution

__all__ = [
    'ExchangeError', 'ExchangeMessage', 'HistoryBuffer', 'RingFabric',
    'CrossTermExchanger', 'ring_route', 'local_contribution',
    'init_cross_terms', 'i1_update', 'i2_update', 'i3_update',
    'count_overhead', 'message_size', 'ConsensusRelay', 'consensus_epoch',
    'unit_phase',
]


class ExchangeError(ValueError):
    pass


def message_size(K, NR):
    return 2 * K * K + NR


class ExchangeMessage(object):
    """Hatted tables and RIS payload sent by one BS in one block.

    ``ris`` holds the running ring sum of RIS proposals, see
    ``ConsensusRelay``.
    """
    def __init__(self, sender, block, table, ris):
        self.sender = sender
        self.block = block
        self.table = table
        self.ris = np.asarray(ris, dtype=complex)

    def get_scalar_count(self):
        K = self.table.get_number_of_ues()
        return message_size(K, len(self.ris))


class HistoryBuffer(object):
    """Own ``(W_b, theta_b)`` snapshots of the last ``depth`` blocks."""
    def __init__(self, depth):
        self._depth = depth
        self._snapshots = deque(maxlen=depth)

    def push(self, block, W_b, theta_b):
        if self._snapshots and block != self._snapshots[-1][0] + 1:
            raise ExchangeError('History must be pushed block by block', block)
        self._snapshots.append((block, np.copy(W_b), np.copy(theta_b)))

    def get(self, block):
        for stored, W_b, theta_b in self._snapshots:
            if stored == block:
                return W_b, theta_b
        raise ExchangeError('Block is not in the history', block)

    def get_blocks(self):
        return [stored for stored, _, _ in self._snapshots]

    def __len__(self):
        return len(self._snapshots)


def ring_route(b, B):
    """Return ``(send_to, recv_from)`` of BS ``b`` (0-based)."""
    if not 0 <= b < B:
        raise ExchangeError('BS index out of range', b)
    return (b - 1) % B, (b + 1) % B


def init_cross_terms(channels, b, theta_b, W_b):
    """Initial I-Layer: nothing to send yet, the used table is local."""
    K = channels.K
    return CrossTermTable.zeros(K), local_contribution(channels, b, theta_b, W_b)


def i1_update(received_prev, received, contribution):
    """I1-Layer: accumulate tables along the ring.

    Parameters
    ----------
    received_prev : CrossTermTable
        Successor table of the previous block (zeros in block 1).
    received : CrossTermTable or None
        Successor table of the current block; None before it arrived.
    contribution : CrossTermTable
        Own contribution formed with the current block's variables.

    Returns
    -------
    outgoing, used : CrossTermTable
        ``used`` is None when ``received`` is None.
    """
    outgoing = received_prev + contribution
    used = None if received is None else received + contribution
    return outgoing, used


def _contribution(channels, b, history, block):
    W_b, theta_b = history.get(block)
    return local_contribution(channels, b, theta_b, W_b)


def i2_update(channels, b, received, history, B):
    """I2-Layer (block B): swap the obsolete block-1 own contribution."""
    blocks = history.get_blocks()
    if 1 not in blocks or B not in blocks:
        raise ExchangeError('I2-Layer needs the snapshots of blocks 1 and B')
    return (received
            - _contribution(channels, b, history, 1)
            + _contribution(channels, b, history, B))


def i3_update(channels, b, l, received_prev, received, history, B, W_b, theta_b):
    """I3-Layer (block l > B).

    ``received_prev`` holds the own block ``l - B`` contribution and is
    refreshed into the outgoing table, ``received`` holds the own block
    ``l - B + 1`` contribution and is refreshed into the used table.
    Either received table may be None to skip that half.
    """
    if l <= B:
        raise ExchangeError('I3-Layer only runs after block B', l)
    fresh = local_contribution(channels, b, theta_b, W_b)
    outgoing = used = None
    if received_prev is not None:
        outgoing = (received_prev
                    - _contribution(channels, b, history, l - B) + fresh)
    if received is not None:
        used = received - _contribution(channels, b, history, l - B + 1) + fresh
    return outgoing, used


def count_overhead(B, L, K, R, N):
    """Complex scalars exchanged by ``B`` BSs over ``L`` blocks.

    A single BS has nobody to send to, so its ``RingFabric`` tally stays
    zero while the formula still counts ``L - 1`` messages.
    """
    return B * (L - 1) * message_size(K, R * N)


def unit_phase(x):
    """Element-wise ``x / |x|``; zero entries map to 1."""
    x = np.asarray(x, dtype=complex)
    magnitude = np.abs(x)
    safe = np.where(magnitude > 0.0, magnitude, 1.0)
    return np.where(magnitude > 0.0, x / safe, 1.0 + 0.0j)


def consensus_epoch(l, B):
    """Return ``(start, offset)`` of block ``l`` in its epoch of ``B - 1`` blocks."""
    if l < 1:
        raise ExchangeError('Block index out of range', l)
    length = max(B - 1, 1)
    offset = (l - 1) % length
    return l - offset, offset


class ConsensusRelay(object):
    """Ring sum of the RIS proposals ``theta_b + lambda_b / rho_b``.

    Each epoch of ``B - 1`` blocks starts with every BS sending its
    proposal; in the following blocks a BS adds the same proposal to the
    payload it received. After the last block of the epoch the received
    payload plus the own proposal is the sum over all BSs, and its phase
    becomes the consensus target. Every BS forms the same sum, so all of
    them hold the same target from then on.
    """
    def __init__(self, B):
        if B < 2:
            raise ExchangeError('A consensus relay needs at least two BSs', B)
        self._B = B
        self._proposal = None
        self._received = None
        self.target = None

    def emit(self, l, proposal):
        """RIS payload of block ``l``."""
        _, offset = consensus_epoch(l, self._B)
        if offset == 0:
            self._proposal = np.array(proposal, dtype=complex)
            return np.copy(self._proposal)
        if self._received is None:
            raise ExchangeError('Relay payload of block {} is missing'.format(l - 1))
        return self._received + self._proposal

    def absorb(self, l, payload):
        """Take the successor payload of block ``l``; returns the target."""
        _, offset = consensus_epoch(l, self._B)
        if self._proposal is None:
            raise ExchangeError('Relay absorbed block {} before sending'.format(l))
        self._received = np.array(payload, dtype=complex)
        if offset == self._B - 2:
            self.target = unit_phase(self._received + self._proposal)
        return self.target


class RingFabric(object):
    """Mailboxes of the ring with a barrier per block.

    Messages of block ``l`` become readable only after ``close_block(l)``.
    """
    def __init__(self, B):
        self._B = B
        self._mailboxes = {}
        self._closed = set()
        self.trace = []
        self.total_scalars = 0

    def post(self, message):
        block = message.block
        if block in self._closed:
            raise ExchangeError('Block already closed', block)
        send_to, _ = ring_route(message.sender, self._B)
        key = (block, send_to)
        if key in self._mailboxes:
            raise ExchangeError('Two messages for one receiver in a block', key)
        self._mailboxes[key] = message
        count = message.get_scalar_count()
        self.trace.append((block, message.sender, send_to, count))
        self.total_scalars += count

    def close_block(self, block):
        self._closed.add(block)

    def receive(self, b, block):
        if block not in self._closed:
            raise ExchangeError('Message read before the barrier of its block', block)
        try:
            return self._mailboxes.pop((block, b))
        except KeyError:
            raise ExchangeError('No message for BS {} in block {}'.format(b, block))

    def get_number_of_messages(self):
        return len(self.trace)


class CrossTermExchanger(object):
    """Exchange state of one BS.

    ``emit`` runs process 1 of a block (outgoing table), ``absorb`` runs
    process 2 of the previous block once its message has arrived.
    """
    def __init__(self, channels, b, B, theta_init, W_init):
        self._channels = channels
        self._b = b
        self._B = B
        self._history = HistoryBuffer(depth=B)
        self._received_prev, self._used = init_cross_terms(
            channels, b, theta_init, W_init)

    def get_used(self):
        return self._used

    def get_history(self):
        return self._history

    def emit(self, kind, l, W_b, theta_b, ris):
        """Record block ``l`` and return the message to send (None if not sent).

        ``ris`` is the RIS payload of the message.
        """
        channels = self._channels
        b = self._b
        B = self._B
        if kind == 'Out':
            return None
        if B == 1:
            self._history.push(l, W_b, theta_b)
            return None
        fresh = local_contribution(channels, b, theta_b, W_b)
        if kind in ('Ini', 'Mid1', 'Mid2'):
            if l > B:
                raise ExchangeError('I1 process run after block B', l)
            outgoing, _ = i1_update(self._received_prev, None, fresh)
        elif kind == 'Mid3':
            outgoing, _ = i3_update(channels, b, l, self._received_prev, None,
                                    self._history, B, W_b, theta_b)
        else:
            raise ExchangeError('Unknown block kind', kind)
        self._history.push(l, W_b, theta_b)
        return ExchangeMessage(b, l, outgoing, ris)

    def absorb(self, kind, l, message):
        """Finish block ``l`` with the successor message of block ``l``.

        Returns the used table of block ``l + 1``.
        """
        channels = self._channels
        b = self._b
        B = self._B
        W_b, theta_b = self._history.get(l)
        if B == 1:
            self._used = local_contribution(channels, b, theta_b, W_b)
            return self._used
        received = message.table
        if kind in ('Ini', 'Mid1'):
            _, used = i1_update(self._received_prev, received,
                                local_contribution(channels, b, theta_b, W_b))
        elif kind == 'Mid2':
            used = i2_update(channels, b, received, self._history, B)
        elif kind == 'Mid3':
            _, used = i3_update(channels, b, l, None, received,
                                self._history, B, W_b, theta_b)
        else:
            raise ExchangeError('Block kind does not exchange', kind)
        self._received_prev = received
        self._used = used
        return used
