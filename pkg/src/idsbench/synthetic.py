"""NSL-KDD-shaped synthetic documents.

Same 42-attribute header as KDDTrain+/KDDTest+ (attribute names, kinds and
nominal vocabularies), with class-conditional random values. Only useful
for smoke runs, runtime benchmarks and tests; accuracies measured on it say
nothing about the real dataset.
"""

from __future__ import annotations

import zlib

import numpy as np

from .arff import NOMINAL, NUMERIC, ArffAttribute, ArffDocument

PROTOCOLS = ("tcp", "udp", "icmp")
SERVICES = (
    "aol", "auth", "bgp", "courier", "csnet_ns", "ctf", "daytime", "discard", "domain", "domain_u",
    "echo", "eco_i", "ecr_i", "efs", "exec", "finger", "ftp", "ftp_data", "gopher", "harvest",
    "hostnames", "http", "http_2784", "http_443", "http_8001", "imap4", "IRC", "iso_tsap", "klogin",
    "kshell", "ldap", "link", "login", "mtp", "name", "netbios_dgm", "netbios_ns", "netbios_ssn",
    "netstat", "nnsp", "nntp", "ntp_u", "other", "pm_dump", "pop_2", "pop_3", "printer", "private",
    "red_i", "remote_job", "rje", "shell", "smtp", "sql_net", "ssh", "sunrpc", "supdup", "systat",
    "telnet", "tftp_u", "tim_i", "time", "urh_i", "urp_i", "uucp", "uucp_path", "vmnet", "whois", "X11",
    "Z39_50",
)
FLAGS = ("OTH", "REJ", "RSTO", "RSTOS0", "RSTR", "S0", "S1", "S2", "S3", "SF", "SH")
BINARY = ("0", "1")

FEATURES = (
    ("duration", NUMERIC), ("protocol_type", PROTOCOLS), ("service", SERVICES), ("flag", FLAGS),
    ("src_bytes", NUMERIC), ("dst_bytes", NUMERIC), ("land", BINARY), ("wrong_fragment", NUMERIC),
    ("urgent", NUMERIC), ("hot", NUMERIC), ("num_failed_logins", NUMERIC), ("logged_in", BINARY),
    ("num_compromised", NUMERIC), ("root_shell", NUMERIC), ("su_attempted", NUMERIC), ("num_root", NUMERIC),
    ("num_file_creations", NUMERIC), ("num_shells", NUMERIC), ("num_access_files", NUMERIC),
    ("num_outbound_cmds", NUMERIC), ("is_host_login", BINARY), ("is_guest_login", BINARY),
    ("count", NUMERIC), ("srv_count", NUMERIC), ("serror_rate", NUMERIC), ("srv_serror_rate", NUMERIC),
    ("rerror_rate", NUMERIC), ("srv_rerror_rate", NUMERIC), ("same_srv_rate", NUMERIC),
    ("diff_srv_rate", NUMERIC), ("srv_diff_host_rate", NUMERIC), ("dst_host_count", NUMERIC),
    ("dst_host_srv_count", NUMERIC), ("dst_host_same_srv_rate", NUMERIC), ("dst_host_diff_srv_rate", NUMERIC),
    ("dst_host_same_src_port_rate", NUMERIC), ("dst_host_srv_diff_host_rate", NUMERIC),
    ("dst_host_serror_rate", NUMERIC), ("dst_host_srv_serror_rate", NUMERIC), ("dst_host_rerror_rate", NUMERIC),
    ("dst_host_srv_rerror_rate", NUMERIC),
)


def nslkdd_attributes() -> tuple[ArffAttribute, ...]:
    attrs = []
    for name, kind in FEATURES:
        if kind == NUMERIC:
            attrs.append(ArffAttribute(name, NUMERIC))
        else:
            attrs.append(ArffAttribute(name, NOMINAL, kind))
    attrs.append(ArffAttribute("class", NOMINAL, ("normal", "anomaly")))
    return tuple(attrs)


def make_document(n_rows: int, seed: int = 0, *, novelty: float = 0.0, attack_rate: float = 0.465,
                  relation: str = "KDDTrain") -> ArffDocument:
    """Random document with the NSL-KDD header.

    ``novelty`` in [0, 1] moves that share of attacks onto feature profiles
    that look normal, mimicking attacks absent from training.
    """
    rng = np.random.default_rng(seed)
    attack = rng.random(n_rows) < attack_rate
    novel = attack & (rng.random(n_rows) < novelty)
    looks_attack = attack & ~novel
    columns = []
    for name, kind in FEATURES:
        if kind == NUMERIC:
            shift = (zlib.crc32(name.encode()) % 7 - 3) * 0.35
            base = rng.normal(size=n_rows)
            values = np.where(looks_attack, base + shift, base)
            if name.endswith("rate"):
                values = np.clip(0.5 + 0.2 * values, 0.0, 1.0).round(2)
            else:
                values = np.round(np.exp(np.clip(values, -3, 3)) * 10) if "bytes" in name or name in (
                    "duration", "count", "srv_count", "dst_host_count", "dst_host_srv_count") else np.round(
                    np.maximum(values, 0.0) * 2)
            if name == "num_outbound_cmds":
                values = np.zeros(n_rows)
            columns.append(values.astype(float).tolist())
        else:
            k = len(kind)
            normal_p = np.linspace(1.0, 2.0, k)
            attack_p = normal_p[::-1] ** 2
            normal_p, attack_p = normal_p / normal_p.sum(), attack_p / attack_p.sum()
            a = rng.choice(k, size=n_rows, p=attack_p)
            b = rng.choice(k, size=n_rows, p=normal_p)
            columns.append(np.where(looks_attack, a, b).tolist())
    columns.append(attack.astype(int).tolist())
    rows = tuple(zip(*columns))
    return ArffDocument(relation, nslkdd_attributes(), rows)

