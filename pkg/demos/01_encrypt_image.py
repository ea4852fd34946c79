# %% [markdown]
# # Encrypting a grey-level image
#
# A key is four small integers: block length L, an initial masking byte,
# and the numerators of mu (over 64) and x(0) (over 256).

# %%
from pathlib import Path

import numpy as np

from dsea import REFERENCE_KEY, decrypt, encrypt
from dsea.chaos import generate_prbs
from dsea.fileio import write_pgm
from dsea.synth import smooth_image

out = Path(__file__).with_name("out")
out.mkdir(exist_ok=True)

img = smooth_image()
print(REFERENCE_KEY)

# %% [markdown]
# Each byte uses one chaotic bit.  The first eight bits are just x(0) in binary.

# %%
bits = generate_prbs(REFERENCE_KEY.x0, REFERENCE_KEY.mu, 24)
print("first bits:", "".join(map(str, bits)))

# %%
c = encrypt(img, REFERENCE_KEY)
write_pgm(out / "plain.pgm", img)
write_pgm(out / "cipher.pgm", c)
print("mean |horizontal step| plain %.1f, cipher %.1f" % (
    np.abs(np.diff(img.astype(int), axis=1)).mean(),
    np.abs(np.diff(c.astype(int), axis=1)).mean()))

# %%
assert np.array_equal(decrypt(c, REFERENCE_KEY), img)
print("decrypts back byte-exactly")
