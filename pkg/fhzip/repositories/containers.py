"""Binary container layouts.

All integers and floats are little-endian. Four containers share the
same conventions:

* ``FHD1`` precoding dataset: config echo then per-sample channels and tensors
* ``FHM1`` codec artifacts: transform, codebooks, entropy model, fingerprint
* ``FHZ1`` compressed bitstream: header then one payload per active stage
* ``FHT1`` single precoding tensor
"""

from dataclasses import replace

import numpy as np

from ..domain import (
    BITSTREAM_MAGIC,
    BITSTREAM_VERSION,
    Bitstream,
    BitstreamHeader,
    ChannelConfig,
    CodebookMismatchError,
    CodebookStack,
    CodecArtifacts,
    CorruptStreamError,
    EntropyModel,
    FormatError,
    InputError,
    PrecoderConfig,
    PrecodingDataset,
    PrecodingSample,
    PrecodingTensor,
    RBChannelSet,
    StageModel,
    TransformPair,
)
from .binary_stream import BinaryReader, BinaryWriter

DATASET_MAGIC = b"FHD1"
ARTIFACTS_MAGIC = b"FHM1"
TENSOR_MAGIC = b"FHT1"
CONTAINER_VERSION = 1

_BITSTREAM_HEADER = "4sBIIIIHBBQ"


def _check_magic(reader: BinaryReader, magic: bytes) -> None:
    found, version = reader.unpack("4sB")
    if found != magic:
        raise FormatError(f"bad magic {found!r}, expected {magic!r}")
    if version != CONTAINER_VERSION:
        raise FormatError(f"unsupported {magic.decode()} version {version}")


def sniff_magic(buffer: bytes) -> bytes:
    """First four bytes of a container."""
    return bytes(buffer[:4])


# ---- FHZ1 -----------------------------------------------------------------


def pack_bitstream(bitstream: Bitstream) -> bytes:
    h = bitstream.header
    writer = BinaryWriter()
    writer.pack(
        _BITSTREAM_HEADER,
        BITSTREAM_MAGIC,
        BITSTREAM_VERSION,
        h.num_rows,
        h.num_tx_antennas,
        h.num_rbs,
        h.num_users,
        h.latent_dim,
        h.active_stages,
        h.model_order,
        h.fingerprint,
    )
    for length in h.payload_lengths:
        writer.pack("I", length)
    for payload in bitstream.payloads:
        writer.pack_bytes(payload)
    return writer.serialize()


def unpack_bitstream(buffer: bytes) -> Bitstream:
    """Parse an FHZ1 bitstream.

    Raises:
        FormatError: On bad magic or version.
        CorruptStreamError: If lengths disagree with the data size.
    """
    reader = BinaryReader(buffer)
    magic, version, rows, nt, rbs, users, dim, active, order, fingerprint = reader.unpack(
        _BITSTREAM_HEADER
    )
    if magic != BITSTREAM_MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {BITSTREAM_MAGIC!r}")
    if version != BITSTREAM_VERSION:
        raise FormatError(f"unsupported bitstream version {version}")
    if rows != rbs * users:
        raise CorruptStreamError(f"header D={rows} but G*K={rbs * users}")
    lengths = tuple(reader.unpack_one("I") for _ in range(active))
    if sum(lengths) != reader.remaining:
        raise CorruptStreamError(
            f"payload lengths sum to {sum(lengths)} bytes, {reader.remaining} present"
        )
    payloads = tuple(reader.unpack_bytes(n) for n in lengths)
    header = BitstreamHeader(
        num_rows=rows,
        num_tx_antennas=nt,
        num_rbs=rbs,
        num_users=users,
        latent_dim=dim,
        model_order=order,
        fingerprint=fingerprint,
        payload_lengths=lengths,
    )
    return Bitstream(header=header, payloads=payloads)


# ---- FHT1 -----------------------------------------------------------------


def pack_tensor(tensor: PrecodingTensor) -> bytes:
    writer = BinaryWriter()
    writer.pack("4sB", TENSOR_MAGIC, CONTAINER_VERSION)
    writer.pack("III", tensor.num_rbs, tensor.num_users, tensor.num_tx_antennas)
    writer.pack_array(tensor.data, "<f8")
    return writer.serialize()


def unpack_tensor(buffer: bytes) -> PrecodingTensor:
    reader = BinaryReader(buffer)
    _check_magic(reader, TENSOR_MAGIC)
    rbs, users, nt = reader.unpack("III")
    data = reader.unpack_array((rbs * users, 2 * nt), "<f8")
    reader.expect_end()
    return PrecodingTensor(data=data, num_rbs=rbs, num_users=users)


# ---- FHD1 -----------------------------------------------------------------


def pack_dataset(dataset: PrecodingDataset) -> bytes:
    ch = dataset.channel_config
    pc = dataset.precoder_config
    writer = BinaryWriter()
    writer.pack("4sB", DATASET_MAGIC, CONTAINER_VERSION)
    writer.pack("IIII", len(dataset), ch.num_rbs, ch.num_users, ch.num_tx_antennas)
    writer.pack(
        "IdIddQB",
        ch.subcarriers_per_rb,
        ch.subcarrier_spacing,
        ch.num_paths,
        ch.rms_delay_spread,
        ch.carrier_freq,
        ch.seed,
        int(ch.rb_average),
    )
    weights = pc.rb_weights or ()
    writer.pack("ddIdI", pc.total_power, pc.noise_power, pc.max_iters, pc.convergence_tol, len(weights))
    writer.pack_array(np.asarray(weights, dtype=np.float64), "<f8")
    for sample in dataset.samples:
        writer.pack("Qd", sample.seed, sample.sum_rate)
        writer.pack_complex(sample.channel.H)
        writer.pack_array(sample.tensor.data, "<f8")
    return writer.serialize()


def unpack_dataset(buffer: bytes) -> PrecodingDataset:
    reader = BinaryReader(buffer)
    _check_magic(reader, DATASET_MAGIC)
    count, rbs, users, nt = reader.unpack("IIII")
    spr, scs, paths, spread, carrier, seed, rb_average = reader.unpack("IdIddQB")
    total_power, noise_power, max_iters, tol, num_weights = reader.unpack("ddIdI")
    weights = reader.unpack_array((num_weights,), "<f8")
    channel_config = ChannelConfig(
        num_tx_antennas=nt,
        num_users=users,
        num_rbs=rbs,
        subcarriers_per_rb=spr,
        subcarrier_spacing=scs,
        num_paths=paths,
        rms_delay_spread=spread,
        carrier_freq=carrier,
        seed=seed,
        rb_average=bool(rb_average),
    )
    precoder_config = PrecoderConfig(
        total_power=total_power,
        noise_power=noise_power,
        max_iters=max_iters,
        convergence_tol=tol,
        rb_weights=tuple(weights.tolist()) if num_weights else None,
    )
    samples = []
    for _ in range(count):
        sample_seed, sum_rate = reader.unpack("Qd")
        H = reader.unpack_complex((rbs, users, nt))
        data = reader.unpack_array((rbs * users, 2 * nt), "<f8")
        samples.append(
            PrecodingSample(
                seed=sample_seed,
                channel=RBChannelSet(H=H, config=replace(channel_config, seed=sample_seed)),
                tensor=PrecodingTensor(data=data, num_rbs=rbs, num_users=users),
                sum_rate=sum_rate,
            )
        )
    reader.expect_end()
    return PrecodingDataset(
        channel_config=channel_config, precoder_config=precoder_config, samples=samples
    )


# ---- FHM1 -----------------------------------------------------------------


def pack_artifacts(artifacts: CodecArtifacts) -> bytes:
    transform = artifacts.transform
    stack = artifacts.codebooks
    model = artifacts.entropy_model
    if model.alphabet_sizes != stack.sizes:
        raise InputError("entropy model alphabets do not match the codebooks")
    writer = BinaryWriter()
    writer.pack("4sB", ARTIFACTS_MAGIC, CONTAINER_VERSION)
    writer.pack(
        "IHBBQ",
        transform.num_tx_antennas,
        transform.latent_dim,
        stack.num_stages,
        model.order,
        stack.fingerprint,
    )
    writer.pack_array(transform.mean, "<f8")
    writer.pack_array(transform.analysis, "<f8")
    for codebook, requested in zip(stack.stages, stack.requested_sizes):
        writer.pack("II", codebook.shape[0], requested)
        writer.pack_array(codebook, "<f8")
    for stage in model.stages:
        writer.pack_array(stage.counts, "<u8")
        if model.order == 1:
            assert stage.context_seen is not None and stage.context_counts is not None
            writer.pack_array(stage.context_seen, "u1")
            writer.pack_array(stage.context_counts, "<u8")
    return writer.serialize()


def unpack_artifacts(buffer: bytes) -> CodecArtifacts:
    """Parse FHM1 artifacts and verify the embedded fingerprint.

    Raises:
        FormatError: On bad magic or version.
        CorruptStreamError: On truncation.
        CodebookMismatchError: If the stored fingerprint does not match the
            stored codewords.
    """
    reader = BinaryReader(buffer)
    _check_magic(reader, ARTIFACTS_MAGIC)
    nt, dim, num_stages, order, fingerprint = reader.unpack("IHBBQ")
    if order not in (0, 1):
        raise CorruptStreamError(f"invalid entropy order {order}")
    mean = reader.unpack_array((2 * nt,), "<f8")
    analysis = reader.unpack_array((dim, 2 * nt), "<f8")
    stages, requested = [], []
    for _ in range(num_stages):
        size, want = reader.unpack("II")
        stages.append(reader.unpack_array((size, dim), "<f8"))
        requested.append(want)
    models = []
    for codebook in stages:
        K = codebook.shape[0]
        counts = reader.unpack_array((K,), "<u8").astype(np.int64)
        if order == 1:
            seen = reader.unpack_array((K,), "u1").astype(bool)
            ctx = reader.unpack_array((K, K), "<u8").astype(np.int64)
            models.append(StageModel(counts=counts, context_counts=ctx, context_seen=seen))
        else:
            models.append(StageModel(counts=counts))
    reader.expect_end()

    stack = CodebookStack(stages=tuple(stages), requested_sizes=tuple(requested))
    if stack.fingerprint != fingerprint:
        raise CodebookMismatchError(
            f"stored fingerprint {fingerprint:016x} != codewords {stack.fingerprint:016x}"
        )
    return CodecArtifacts(
        transform=TransformPair(analysis=analysis, mean=mean),
        codebooks=stack,
        entropy_model=EntropyModel(stages=tuple(models), order=order),
    )
