"""Regenerates the 128x128 test scenes and their foreground masks."""
import numpy as np
from PIL import Image

N = 128
yy, xx = np.mgrid[0:N, 0:N].astype(np.float64)


def save(name, rgb, mask):
    Image.fromarray(np.clip(np.rint(rgb * 255), 0, 255).astype(np.uint8), "RGB").save(f"{name}.png")
    Image.fromarray((mask * 255).astype(np.uint8), "L").save(f"{name}_mask.png")


def bird():
    t = yy / (N - 1)
    rgb = np.stack([0.35 + 0.3 * t, 0.55 + 0.25 * t, 0.85 + 0.1 * t], -1)
    body = ((xx - 60) / 30) ** 2 + ((yy - 66) / 18) ** 2 < 1
    head = ((xx - 92) / 12) ** 2 + ((yy - 48) / 12) ** 2 < 1
    wing = ((xx - 52) / 20) ** 2 + ((yy - 58) / 8) ** 2 < 1
    mask = body | head
    rgb[mask] = [0.55, 0.35, 0.15]
    rgb[wing & mask] = [0.3, 0.18, 0.08]
    rgb[head] = [0.85, 0.2, 0.15]
    eye = ((xx - 96) ** 2 + (yy - 45) ** 2) < 6
    rgb[eye] = [0.05, 0.05, 0.05]
    return rgb, mask


def car():
    rgb = np.zeros((N, N, 3))
    rgb[:] = [0.75, 0.8, 0.85]
    rgb[yy > 80] = [0.3, 0.3, 0.32]
    body = (xx > 24) & (xx < 104) & (yy > 58) & (yy < 84)
    cabin = (xx > 42) & (xx < 86) & (yy > 40) & (yy <= 58)
    wheels = (((xx - 44) ** 2 + (yy - 86) ** 2) < 100) | (((xx - 86) ** 2 + (yy - 86) ** 2) < 100)
    mask = body | cabin | wheels
    rgb[body | cabin] = [0.8, 0.1, 0.1]
    rgb[cabin & (yy > 44) & (np.abs(xx - 64) > 3)] = [0.5, 0.7, 0.9]
    rgb[wheels] = [0.08, 0.08, 0.08]
    return rgb, mask


def flower():
    rgb = np.stack([0.2 + 0.1 * np.sin(xx / 9), 0.5 + 0.1 * np.cos(yy / 11), 0.2 + 0 * xx], -1)
    r = np.hypot(xx - 64, yy - 60)
    ang = np.arctan2(yy - 60, xx - 64)
    petals = r < 26 + 8 * np.cos(5 * ang)
    center = r < 10
    stem = (np.abs(xx - 64) < 3) & (yy > 60)
    mask = petals | stem
    rgb[petals] = [0.95, 0.85, 0.2]
    rgb[center] = [0.45, 0.25, 0.05]
    rgb[stem & ~petals] = [0.1, 0.4, 0.1]
    return rgb, mask


if __name__ == "__main__":
    for name, fn in [("bird", bird), ("car", car), ("flower", flower)]:
        save(name, *fn())
