"""Model artifact files.

Layout::

    b"WHYBART" | version (1 byte) | header length (uint32 LE) | header JSON (UTF-8)
    | payload: float64 LE tensors in manifest order | SHA-256 of everything before it

The header holds the kind, status, step/approach, config snapshot and the
tensor manifest ``[[name, shape], ...]``. Scaler parameters travel as
ordinary tensors so they round-trip bit-exactly.
"""
import hashlib
import json
import struct
from dataclasses import dataclass

import numpy as np

from .ar import ArModel
from .data import ScalerParams
from .nn.network import PARAM_ORDER, NetworkState

MAGIC = b"WHYBART"
VERSION = 1
_DIGEST = 32


class ArtifactError(ValueError):
    pass


class ArtifactVersionError(ArtifactError):
    pass


class ArtifactChecksumError(ArtifactError):
    pass


@dataclass
class ModelArtifact:
    header: dict
    tensors: dict  # name -> ndarray, in manifest order
    version: int = VERSION

    @property
    def kind(self):
        return self.header["kind"]

    @property
    def status(self):
        return self.header.get("status", "ok")


def encode(artifact):
    manifest = [[name, list(arr.shape)] for name, arr in artifact.tensors.items()]
    header = dict(artifact.header, manifest=manifest)
    hbytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    payload = b"".join(np.ascontiguousarray(a, dtype="<f8").tobytes() for a in artifact.tensors.values())
    body = MAGIC + bytes([VERSION]) + struct.pack("<I", len(hbytes)) + hbytes + payload
    return body + hashlib.sha256(body).digest()


def decode(blob, name="<bytes>"):
    if not blob.startswith(MAGIC):
        raise ArtifactError(f"{name}: not a model artifact")
    if len(blob) <= len(MAGIC):
        raise ArtifactChecksumError(f"{name}: checksum mismatch (truncated)")
    version = blob[len(MAGIC)]
    if version != VERSION:
        raise ArtifactVersionError(f"{name}: unsupported artifact version {version}")
    body, digest = blob[:-_DIGEST], blob[-_DIGEST:]
    if len(blob) < len(MAGIC) + 5 + _DIGEST or hashlib.sha256(body).digest() != digest:
        raise ArtifactChecksumError(f"{name}: checksum mismatch")
    pos = len(MAGIC) + 1
    (hlen,) = struct.unpack_from("<I", body, pos)
    pos += 4
    header = json.loads(body[pos:pos + hlen].decode("utf-8"))
    pos += hlen
    tensors = {}
    for tname, shape in header.pop("manifest"):
        count = int(np.prod(shape)) if shape else 1
        nbytes = 8 * count
        if pos + nbytes > len(body):
            raise ArtifactError(f"{name}: payload shorter than manifest")
        tensors[tname] = np.frombuffer(body, dtype="<f8", count=count, offset=pos).astype(np.float64).reshape(shape)
        pos += nbytes
    if pos != len(body):
        raise ArtifactError(f"{name}: payload longer than manifest")
    return ModelArtifact(header, tensors, version)


def save_artifact(path, artifact):
    with open(path, "wb") as fh:
        fh.write(encode(artifact))


def load_artifact(path):
    with open(path, "rb") as fh:
        return decode(fh.read(), name=str(path))


def _scaler_tensors(scaler):
    if scaler is None:
        return {}
    return {"scaler.min": scaler.data_min, "scaler.max": scaler.data_max}


def network_artifact(state, header, scaler=None):
    tensors = {k: state.params[k] for k in PARAM_ORDER}
    tensors.update(_scaler_tensors(scaler))
    return ModelArtifact(dict(header, kind="cnn_lstm", seed=state.seed, status=header.get("status", state.status)),
                         tensors)


def ar_artifact(model, header, scaler=None):
    tensors = {"coefficients": model.coefficients, "intercept": model.intercept}
    tensors.update(_scaler_tensors(scaler))
    return ModelArtifact(dict(header, kind=header.get("kind", "ar"), n_steps=model.n_steps,
                              n_features=model.n_features), tensors)


def to_network_state(art):
    params = {k: art.tensors[k].copy() for k in PARAM_ORDER}
    return NetworkState(params, int(art.header.get("seed", 0)), art.status)


def to_ar_model(art):
    return ArModel(art.tensors["coefficients"].copy(), art.tensors["intercept"].copy(),
                   int(art.header["n_steps"]), int(art.header["n_features"]))


def to_scaler(art):
    if "scaler.min" not in art.tensors:
        return None
    return ScalerParams(art.tensors["scaler.min"].copy(), art.tensors["scaler.max"].copy())
