from .translator import (
    BODY_WORDS,
    HAND_WORDS,
    HEAD_WORDS,
    PARTS,
    VOCABULARIES,
    TranslatorConfig,
    translate,
)
from .extractor import DegenerateTorsoError, ExtractorFrame, extract_head, extract_frames
from .timeline import StatusTimeline, status_timeline
from .combiner import EnhancedCaption, combine, merge_consecutive

__all__ = [
    "BODY_WORDS",
    "HAND_WORDS",
    "HEAD_WORDS",
    "PARTS",
    "VOCABULARIES",
    "TranslatorConfig",
    "translate",
    "DegenerateTorsoError",
    "ExtractorFrame",
    "extract_head",
    "extract_frames",
    "StatusTimeline",
    "status_timeline",
    "EnhancedCaption",
    "combine",
    "merge_consecutive",
]
