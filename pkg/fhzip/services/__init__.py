"""Service layer for channel generation, precoding and compression.

Provides service interfaces (protocols) and implementations for every
stage of the pipeline plus the command-level facade.
"""

from .interfaces import (
    IChannelService,
    ICodecService,
    IConfigService,
    IEntropyService,
    IMetricsService,
    IPipelineService,
    IPrecoderService,
    IQuantizerService,
    ITransformService,
)
from .channel_service import ChannelService
from .precoder_service import PrecoderService
from .transform_service import TransformService
from .quantizer_service import QuantizerService
from .entropy_service import EntropyService
from .codec_service import CodecService, choose_stages_rd, select_stages
from .metrics_service import MetricsService, project_power
from .config_service import ConfigService
from .pipeline_service import PipelineService

__all__ = [
    "IChannelService",
    "ICodecService",
    "IConfigService",
    "IEntropyService",
    "IMetricsService",
    "IPipelineService",
    "IPrecoderService",
    "IQuantizerService",
    "ITransformService",
    "ChannelService",
    "PrecoderService",
    "TransformService",
    "QuantizerService",
    "EntropyService",
    "CodecService",
    "MetricsService",
    "ConfigService",
    "PipelineService",
    "choose_stages_rd",
    "select_stages",
    "project_power",
]
