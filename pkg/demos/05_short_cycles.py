# %% [markdown]
# # Eight-bit states cycle quickly
#
# With only 256 possible states the orbit must repeat within 256 steps.
# How soon depends on exactly how the product is rounded.

# %%
from pathlib import Path

import time

from dsea.chaos import PrecisionMode, detect_cycle, format_survey, generate_prbs, prbs_to_image, survey_quantization
from dsea.errors import IterationCapExceededError
from dsea.fileio import write_pgm

out = Path(__file__).with_name("out")
out.mkdir(exist_ok=True)

print(format_survey(survey_quantization(69, 251)))

# %%
for mode in (PrecisionMode.FIXED8_TRUNC, PrecisionMode.FLOAT64):
    bits = generate_prbs(69, 251, 65536, mode)
    write_pgm(out / f"prbs_{mode.value}.pgm", prbs_to_image(bits, 256))

# %% [markdown]
# In double precision there is no repeat anywhere near that scale.

# %%
t = time.perf_counter()
try:
    detect_cycle(69, 251, PrecisionMode.FLOAT64, cap=2**24)
except IterationCapExceededError as exc:
    print(exc, f"({time.perf_counter() - t:.1f} s)")
