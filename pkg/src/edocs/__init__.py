"""Sublinear-time support recovery for one-bit compressed sensing."""

from .core import (BinaryDesign, BlockSensingMatrix, MeasurementBits, SparseSignal, measure_binary,
                   measure_blocks, nz_scalar, sign_scalar)
from .designs import (DesignParams, SignatureMatrix, build_random_cw_design, build_signature,
                      decode_singleton, magnify, sizing_aa, sizing_ae)
from .foreach import AstimBlock, EeScheme, build_astim, build_ee, decode_ee, kalpha
from .splitting import FbsDesign, GtResult, build_fbs, fbs_decode
from .universal import RecoveredSupport, UniversalScheme, build_aa, build_ae, decode

__version__ = "0.1.0"
