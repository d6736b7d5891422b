"""Deterministic image representation of a P3 moment.

Every pixel takes the color class of its nearest player (Voronoi pitch
control): possession team blue, opposition red, passer black. Pixels
outside the camera's visible area become background, then the target
hull is alpha-blended in green. The attack always points from the
bottom of the image to the top.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from p3engine.detect import P3Moment
from p3engine.geometry import NO_OWNER, PitchGrid, _OUTSIDE_CODE, classify_points, voronoi_owner_grid
from p3engine.png import encode_png

RGB = tuple[int, int, int]


@dataclass(frozen=True)
class RenderConfig:
    width: int = 224
    height: int = 224
    team_possession: RGB = (0, 0, 255)
    team_opposition: RGB = (255, 0, 0)
    passer: RGB = (0, 0, 0)
    hull: RGB = (0, 255, 0)
    background: RGB = (255, 255, 255)
    hull_alpha: float = 0.5
    clip_to_visible_area: bool = True

    def __post_init__(self):
        if self.width < 16 or self.height < 16:
            raise ValueError("canvas must be at least 16x16")
        if not 0.0 <= self.hull_alpha <= 1.0:
            raise ValueError("hull_alpha must lie in [0, 1]")

    def to_json(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "team_possession": list(self.team_possession),
            "team_opposition": list(self.team_opposition),
            "passer": list(self.passer),
            "hull": list(self.hull),
            "background": list(self.background),
            "hull_alpha": self.hull_alpha,
            "clip_to_visible_area": self.clip_to_visible_area,
        }

    @staticmethod
    def from_json(obj: dict) -> "RenderConfig":
        return RenderConfig(
            width=obj["width"],
            height=obj["height"],
            team_possession=tuple(obj["team_possession"]),
            team_opposition=tuple(obj["team_opposition"]),
            passer=tuple(obj["passer"]),
            hull=tuple(obj["hull"]),
            background=tuple(obj["background"]),
            hull_alpha=obj["hull_alpha"],
            clip_to_visible_area=obj["clip_to_visible_area"],
        )


@dataclass
class RasterImage:
    width: int
    height: int
    pixels: np.ndarray  # (height, width, 3) uint8, row-major

    def __post_init__(self):
        if self.pixels.shape != (self.height, self.width, 3):
            raise ValueError("pixel buffer does not match declared size")


def render_moment(moment: P3Moment, cfg: RenderConfig = RenderConfig()) -> RasterImage:
    """Render one moment to an RGB raster, bit-stable across runs."""
    grid = PitchGrid(cfg.width, cfg.height)
    seeds = [p.location for p in moment.all_players]
    clip = moment.visible_area if cfg.clip_to_visible_area else None
    owners = voronoi_owner_grid(seeds, grid, clip=clip).owners

    palette = np.empty((len(seeds) + 1, 3), dtype=np.uint8)
    palette[NO_OWNER] = cfg.background  # index -1: clipped-out pixels
    for i, player in enumerate(moment.all_players):
        if player.actor:
            palette[i] = cfg.passer
        elif player.teammate:
            palette[i] = cfg.team_possession
        else:
            palette[i] = cfg.team_opposition
    pixels = palette[owners]

    px, py = grid.pixel_centers()
    in_hull = classify_points(px, py, moment.hull) != _OUTSIDE_CODE
    alpha = cfg.hull_alpha
    green = np.asarray(cfg.hull, dtype=np.float64)
    blended = np.floor((1.0 - alpha) * pixels[in_hull] + alpha * green + 0.5)
    pixels[in_hull] = blended.astype(np.uint8)
    return RasterImage(width=cfg.width, height=cfg.height, pixels=pixels)


def render_png(moment: P3Moment, cfg: RenderConfig = RenderConfig()) -> bytes:
    return encode_png(render_moment(moment, cfg).pixels)


def raster_to_input(image: RasterImage) -> np.ndarray:
    """(3, H, W) float64 in [0, 1], the classifier input layout."""
    return np.ascontiguousarray(image.pixels.transpose(2, 0, 1).astype(np.float64) / 255.0)
