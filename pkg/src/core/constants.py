"""
Shared constants for ALE Edit.
"""

# Padded prompt length and special token ids of the reference (CLIP) encoder
PROMPT_LENGTH = 77
BOS_TOKEN_ID = 49406
EOS_TOKEN_ID = 49407

# Object prompts are always joined with this connective
CONNECTIVE = " and "

# EOS handling strategies for the base embedding
EOS_STRATEGIES = ("ore", "naive", "zeros", "bos", "empty", "ets")

# Benchmark edit types (color+material and triple combinations are excluded)
EDIT_TYPES = ("color", "object", "material", "color+object", "object+material")

# Self-attention injection fraction per edit type
SCHEDULE_BY_EDIT_TYPE = {
    "color": 1.0,
    "object": 0.5,
    "material": 0.6,
    "color+object": 0.5,
    "object+material": 0.5,
}

DEFAULT_EDIT_TYPE = "object"
DEFAULT_NUM_STEPS = 15
DEFAULT_DILATION_RATIO = 0.01
MAX_DILATION_RATIO = 0.25

# Area-averaged mask downsampling threshold
MASK_THRESHOLD = 0.5

# Reported PSNR when the background is reproduced exactly
PSNR_CAP = 99.0

# Scenario grid: instances per (image, edit type, K) cell and object counts
INSTANCES_PER_CELL = 10
OBJECT_COUNTS = (1, 2, 3)
