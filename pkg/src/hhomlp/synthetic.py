"""Synthetic data generators.

:func:`make_kdd_like` writes rows in the 41-feature KDD Cup 99 layout
(see ``schemas/kdd.schema``).  Each attack family is drawn from a
caricature of its traffic signature in the public corpus (smurf floods of
1032-byte ICMP echo replies, neptune SYN floods with ``S0`` flags and
saturated error rates, sweeps with rejected connections, content attacks
hidden in ordinary-looking TCP sessions).  A configurable fraction of
attack rows is drawn from the normal-traffic generator, which caps the
attainable accuracy below 1.

The other generators build small numeric fixtures used by the tests and
the CLI demos.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .data import builtin_schema

__all__ = [
    "DEFAULT_FAMILY_MIX",
    "KDD99_FAMILY_MIX",
    "make_kdd_like",
    "write_csv",
    "make_linearly_separable",
    "make_one_informative",
]

DEFAULT_FAMILY_MIX = {"normal": 0.40, "dos": 0.45, "probe": 0.10, "r2l": 0.04, "u2r": 0.01}
# class shares of the public KDD Cup 99 10% training sample
KDD99_FAMILY_MIX = {"normal": 0.1969, "dos": 0.7924, "probe": 0.0083, "r2l": 0.0023, "u2r": 0.0001}

_FEATURES = builtin_schema("kdd").feature_names


def _pick(rng, options: dict):
    keys = list(options)
    p = np.array(list(options.values()), dtype=float)
    return keys[rng.choice(len(keys), p=p / p.sum())]


def _base(rng) -> dict:
    row = dict.fromkeys(_FEATURES, 0.0)
    row.update(protocol_type="tcp", service="http", flag="SF")
    row["dst_host_count"] = float(rng.integers(1, 256))
    row["dst_host_srv_count"] = float(rng.integers(1, 256))
    return row


def _normal(rng) -> dict:
    row = _base(rng)
    proto = _pick(rng, {"tcp": 0.82, "udp": 0.15, "icmp": 0.03})
    row["protocol_type"] = proto
    if proto == "tcp":
        row["service"] = _pick(rng, {"http": 0.55, "smtp": 0.15, "ftp_data": 0.10, "ftp": 0.04,
                                     "telnet": 0.03, "private": 0.05, "pop_3": 0.04, "other": 0.04})
        row["flag"] = _pick(rng, {"SF": 0.93, "REJ": 0.02, "S0": 0.01, "RSTO": 0.02, "S1": 0.02})
        row["logged_in"] = float(row["service"] in ("http", "smtp", "ftp", "ftp_data", "telnet", "pop_3")
                                 and rng.random() < 0.92)
        row["dst_bytes"] = float(int(rng.lognormal(7.5, 1.5)))
    elif proto == "udp":
        row["service"] = _pick(rng, {"domain_u": 0.7, "private": 0.2, "ntp_u": 0.1})
        row["dst_bytes"] = float(int(rng.lognormal(4.5, 0.8)))
    else:
        row["service"] = _pick(rng, {"ecr_i": 0.5, "eco_i": 0.3, "urp_i": 0.2})
    row["duration"] = 0.0 if rng.random() < 0.8 else float(int(rng.exponential(200)))
    row["src_bytes"] = float(int(rng.lognormal(5.5, 1.2)))
    row["hot"] = float(rng.poisson(0.1))
    row["count"] = float(rng.poisson(6) + 1)
    row["srv_count"] = row["count"] + float(rng.poisson(4))
    if rng.random() < 0.03:
        row["serror_rate"] = row["srv_serror_rate"] = float(rng.random())
    if rng.random() < 0.05:
        row["rerror_rate"] = row["srv_rerror_rate"] = float(rng.random())
    row["same_srv_rate"] = float(rng.beta(20, 1))
    row["diff_srv_rate"] = float(rng.beta(1, 20))
    row["srv_diff_host_rate"] = float(rng.beta(1, 5))
    row["dst_host_same_srv_rate"] = float(rng.beta(5, 1))
    row["dst_host_diff_srv_rate"] = float(rng.beta(1, 15))
    row["dst_host_same_src_port_rate"] = float(rng.beta(1, 6))
    row["dst_host_srv_diff_host_rate"] = float(rng.beta(1, 8))
    row["dst_host_serror_rate"] = row["dst_host_srv_serror_rate"] = float(rng.beta(1, 50))
    row["dst_host_rerror_rate"] = row["dst_host_srv_rerror_rate"] = float(rng.beta(1, 30))
    return row


def _dos(rng) -> tuple[dict, str]:
    row = _base(rng)
    kind = _pick(rng, {"smurf": 0.57, "neptune": 0.40, "back": 0.02, "teardrop": 0.01})
    if kind == "smurf":
        row.update(protocol_type="icmp", service="ecr_i", flag="SF")
        row["src_bytes"] = float(rng.choice([1032, 520]))
        row["count"] = row["srv_count"] = float(rng.integers(300, 512))
        row["same_srv_rate"] = 1.0
        row["dst_host_count"] = row["dst_host_srv_count"] = 255.0
        row["dst_host_same_srv_rate"] = row["dst_host_same_src_port_rate"] = 1.0
    elif kind == "neptune":
        row["service"] = _pick(rng, {"private": 0.6, "http": 0.1, "telnet": 0.1, "ftp": 0.1, "other": 0.1})
        row["flag"] = "S0" if rng.random() < 0.9 else "REJ"
        row["count"] = float(rng.integers(100, 512))
        row["srv_count"] = float(rng.integers(1, 30))
        err = "serror" if row["flag"] == "S0" else "rerror"
        row[f"{err}_rate"] = row[f"srv_{err}_rate"] = 1.0
        row[f"dst_host_{err}_rate"] = row[f"dst_host_srv_{err}_rate"] = 1.0
        row["same_srv_rate"] = float(rng.beta(1, 15))
        row["diff_srv_rate"] = float(rng.beta(1, 12))
        row["dst_host_count"] = 255.0
        row["dst_host_srv_count"] = float(rng.integers(1, 30))
        row["dst_host_same_srv_rate"] = float(rng.beta(1, 15))
        row["dst_host_diff_srv_rate"] = float(rng.beta(1, 12))
    elif kind == "back":
        row["src_bytes"] = float(rng.normal(54540, 500))
        row["dst_bytes"] = float(rng.normal(8314, 300))
        row["hot"] = 2.0
        row["logged_in"] = 1.0
        row["count"] = row["srv_count"] = float(rng.integers(1, 10))
        row["same_srv_rate"] = 1.0
    else:
        row.update(protocol_type="udp", service="private")
        row["src_bytes"] = 28.0
        row["wrong_fragment"] = 3.0
        row["count"] = row["srv_count"] = float(rng.integers(1, 5))
    return row, kind


def _probe(rng) -> tuple[dict, str]:
    row = _base(rng)
    kind = _pick(rng, {"ipsweep": 0.3, "portsweep": 0.25, "satan": 0.3, "nmap": 0.15})
    if kind == "ipsweep":
        row.update(protocol_type="icmp", service="eco_i")
        row["src_bytes"] = float(rng.integers(8, 19))
        row["count"] = row["srv_count"] = float(rng.integers(1, 4))
        row["srv_diff_host_rate"] = 1.0
        row["dst_host_srv_count"] = float(rng.integers(1, 100))
        row["dst_host_same_src_port_rate"] = 1.0
        row["dst_host_srv_diff_host_rate"] = float(rng.beta(5, 2))
    elif kind == "portsweep":
        row.update(service="private", flag=_pick(rng, {"REJ": 0.5, "RSTR": 0.4, "S0": 0.1}))
        row["duration"] = float(rng.integers(0, 3000)) if rng.random() < 0.3 else 0.0
        row["count"] = row["srv_count"] = float(rng.integers(1, 3))
        row["rerror_rate"] = row["srv_rerror_rate"] = 1.0
        row["dst_host_srv_count"] = 1.0
        row["dst_host_diff_srv_rate"] = float(rng.beta(5, 2))
        row["dst_host_rerror_rate"] = row["dst_host_srv_rerror_rate"] = 1.0
    elif kind == "satan":
        row.update(service=_pick(rng, {"private": 0.4, "other": 0.3, "telnet": 0.1, "http": 0.2}), flag="REJ")
        row["count"] = float(rng.integers(1, 100))
        row["srv_count"] = float(rng.integers(1, 5))
        row["rerror_rate"] = float(rng.uniform(0.8, 1.0))
        row["srv_rerror_rate"] = 1.0
        row["diff_srv_rate"] = float(rng.uniform(0.5, 1.0))
        row["same_srv_rate"] = float(rng.beta(1, 5))
        row["dst_host_diff_srv_rate"] = float(rng.uniform(0.5, 1.0))
        row["dst_host_rerror_rate"] = float(rng.uniform(0.5, 1.0))
    else:
        row.update(protocol_type=_pick(rng, {"tcp": 0.6, "udp": 0.2, "icmp": 0.2}), service="private",
                   flag=_pick(rng, {"SH": 0.5, "S0": 0.5}))
        row["count"] = row["srv_count"] = float(rng.integers(1, 4))
        row["dst_host_srv_count"] = float(rng.integers(1, 20))
        row["dst_host_diff_srv_rate"] = float(rng.beta(4, 2))
        row["dst_host_serror_rate"] = float(rng.beta(2, 2))
    return row, kind


def _r2l(rng) -> tuple[dict, str]:
    row = _normal(rng)
    kind = _pick(rng, {"warezclient": 0.5, "guess_passwd": 0.3, "warezmaster": 0.2})
    row["protocol_type"] = "tcp"
    row["flag"] = "SF"
    if kind == "warezclient":
        row["service"] = "ftp_data"
        row["duration"] = float(rng.integers(100, 15000))
        row["src_bytes"] = float(int(rng.lognormal(10, 1)))
        row["hot"] = float(rng.integers(2, 30))
        row["is_guest_login"] = float(rng.random() < 0.5)
        row["logged_in"] = 1.0
    elif kind == "guess_passwd":
        row["service"] = "telnet"
        row["flag"] = _pick(rng, {"RSTO": 0.7, "SF": 0.3})
        row["src_bytes"], row["dst_bytes"] = 125.0, 179.0
        row["num_failed_logins"] = 1.0
        row["logged_in"] = 0.0
        row["count"] = row["srv_count"] = 1.0
    else:
        row["service"] = "ftp"
        row["hot"] = float(rng.integers(1, 5))
        row["is_guest_login"] = 1.0
        row["logged_in"] = 1.0
    return row, kind


def _u2r(rng) -> tuple[dict, str]:
    row = _normal(rng)
    kind = _pick(rng, {"buffer_overflow": 0.6, "rootkit": 0.3, "perl": 0.1})
    row.update(protocol_type="tcp", service="telnet", flag="SF")
    row["duration"] = float(rng.integers(30, 300))
    row["src_bytes"] = float(rng.integers(1000, 2000))
    row["dst_bytes"] = float(rng.integers(2000, 8000))
    row["hot"] = float(rng.integers(1, 4))
    row["root_shell"] = 1.0
    row["num_file_creations"] = float(rng.integers(0, 3))
    row["logged_in"] = 1.0
    return row, kind


_FAMILIES = {"dos": _dos, "probe": _probe, "r2l": _r2l, "u2r": _u2r}
_DISGUISE = {"dos": "back", "probe": "satan", "r2l": "warezclient", "u2r": "rootkit"}


def make_kdd_like(n_rows: int, seed: int = 0, family_mix: dict | None = None,
                  disguised_fraction: float = 0.02) -> list[list]:
    """Rows of 41 KDD features followed by the attack label (e.g. ``smurf.``).

    ``family_mix`` gives the class proportions (defaults to
    :data:`DEFAULT_FAMILY_MIX`).  ``disguised_fraction`` of the attack rows
    carry normal-looking features.
    """
    if n_rows < 0:
        raise ValueError("n_rows must be non-negative")
    mix = dict(family_mix or DEFAULT_FAMILY_MIX)
    unknown = set(mix) - {"normal", *_FAMILIES}
    if unknown:
        raise ValueError(f"unknown families: {sorted(unknown)}")
    rng = np.random.default_rng(seed)
    rows = []
    for _ in range(n_rows):
        family = _pick(rng, mix)
        if family == "normal":
            row, label = _normal(rng), "normal"
        elif rng.random() < disguised_fraction:
            row, label = _normal(rng), _DISGUISE[family]
        else:
            row, label = _FAMILIES[family](rng)
        rows.append([_cell(row[name]) for name in _FEATURES] + [label + "."])
    return rows


def _cell(value):
    if isinstance(value, str):
        return value
    value = float(value)
    return int(value) if value.is_integer() else round(value, 2)


def write_csv(rows, path, header: list[str] | None = None) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if header:
            writer.writerow(header)
        writer.writerows(rows)


def make_linearly_separable(n_rows: int = 200, seed: int = 0, margin: float = 0.1):
    """Points in the unit square labelled by ``x0 + x1 > 1``.

    Points closer than ``margin`` to the boundary are rejected, so the
    classes are separated by a band of width ``2 * margin / sqrt(2)``.
    """
    rng = np.random.default_rng(seed)
    X = np.empty((0, 2))
    while len(X) < n_rows:
        cand = rng.random((2 * n_rows, 2))
        cand = cand[np.abs(cand.sum(axis=1) - 1.0) >= margin]
        X = np.vstack([X, cand])
    X = X[:n_rows]
    y = (X.sum(axis=1) > 1.0).astype(int)
    return X, y


def make_one_informative(n_rows: int = 200, n_features: int = 10, seed: int = 0):
    """Column 0 equals the 0/1 label; the other columns are uniform noise."""
    rng = np.random.default_rng(seed)
    y = rng.integers(0, 2, n_rows)
    X = rng.random((n_rows, n_features))
    X[:, 0] = y
    return X, y
