"""Network architectures: U-Net generator, patch discriminator, pose backbones."""

from __future__ import annotations

import torch
import torch.nn as nn
import torch.nn.functional as F


class UNetGenerator(nn.Module):
    """Encoder-decoder with skip connections and dropout-as-noise.

    Four stride-2 encoder stages, mirrored decoder.  Dropout in the inner
    decoder stages stays active at generation time too: it plays the role of
    the stochastic input z, so generation is seeded rather than silenced.
    Inputs of any size are reflect-padded to a multiple of 16 and cropped
    back, keeping output dimensions equal to input dimensions.
    """

    def __init__(self, in_channels: int = 1, out_channels: int = 1,
                 base: int = 32, dropout: float = 0.5):
        super().__init__()
        c1, c2, c3, c4 = base, base * 2, base * 4, base * 8
        self.down1 = nn.Sequential(nn.Conv2d(in_channels, c1, 4, 2, 1),
                                   nn.LeakyReLU(0.2, inplace=True))
        self.down2 = nn.Sequential(nn.Conv2d(c1, c2, 4, 2, 1),
                                   nn.InstanceNorm2d(c2),
                                   nn.LeakyReLU(0.2, inplace=True))
        self.down3 = nn.Sequential(nn.Conv2d(c2, c3, 4, 2, 1),
                                   nn.InstanceNorm2d(c3),
                                   nn.LeakyReLU(0.2, inplace=True))
        self.down4 = nn.Sequential(nn.Conv2d(c3, c4, 4, 2, 1),
                                   nn.InstanceNorm2d(c4),
                                   nn.LeakyReLU(0.2, inplace=True))
        self.up3 = nn.Sequential(nn.ConvTranspose2d(c4, c3, 4, 2, 1),
                                 nn.InstanceNorm2d(c3), nn.ReLU(inplace=True))
        self.up2 = nn.Sequential(nn.ConvTranspose2d(c3 * 2, c2, 4, 2, 1),
                                 nn.InstanceNorm2d(c2), nn.ReLU(inplace=True))
        self.up1 = nn.Sequential(nn.ConvTranspose2d(c2 * 2, c1, 4, 2, 1),
                                 nn.InstanceNorm2d(c1), nn.ReLU(inplace=True))
        self.final = nn.ConvTranspose2d(c1 * 2, out_channels, 4, 2, 1)
        self.dropout = dropout

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        h, w = x.shape[-2:]
        pad_h = (-h) % 16
        pad_w = (-w) % 16
        if pad_h or pad_w:
            x = F.pad(x, (0, pad_w, 0, pad_h), mode="reflect")
        d1 = self.down1(x)
        d2 = self.down2(d1)
        d3 = self.down3(d2)
        d4 = self.down4(d3)
        u3 = self.up3(d4)
        u3 = F.dropout(u3, self.dropout, training=True)  # stochastic z, always on
        u2 = self.up2(torch.cat([u3, d3], dim=1))
        u2 = F.dropout(u2, self.dropout, training=True)
        u1 = self.up1(torch.cat([u2, d2], dim=1))
        out = torch.tanh(self.final(torch.cat([u1, d1], dim=1)))
        if pad_h or pad_w:
            out = out[..., :h, :w]
        return out


class PatchDiscriminator(nn.Module):
    """Patch-level discriminator on (input, candidate) channel pairs.

    Three stride-2 stages then a 1-channel logit map; each output cell judges
    one receptive-field patch rather than the whole image.
    """

    def __init__(self, in_channels: int = 2, base: int = 32):
        super().__init__()
        c1, c2, c3 = base, base * 2, base * 4
        self.net = nn.Sequential(
            nn.Conv2d(in_channels, c1, 4, 2, 1), nn.LeakyReLU(0.2, inplace=True),
            nn.Conv2d(c1, c2, 4, 2, 1), nn.InstanceNorm2d(c2),
            nn.LeakyReLU(0.2, inplace=True),
            nn.Conv2d(c2, c3, 4, 2, 1), nn.InstanceNorm2d(c3),
            nn.LeakyReLU(0.2, inplace=True),
            nn.Conv2d(c3, 1, 4, 1, 1),
        )

    def forward(self, x: torch.Tensor, y: torch.Tensor) -> torch.Tensor:
        return self.net(torch.cat([x, y], dim=1))


class PoseCNN(nn.Module):
    """3-conv-block classifier with separate pitch and roll heads."""

    def __init__(self, n_pitch: int, n_roll: int, image_size: int = 64,
                 base: int = 16):
        super().__init__()
        c1, c2, c3 = base, base * 2, base * 4
        self.features = nn.Sequential(
            nn.Conv2d(1, c1, 3, padding=1), nn.BatchNorm2d(c1), nn.ReLU(inplace=True),
            nn.MaxPool2d(2),
            nn.Conv2d(c1, c2, 3, padding=1), nn.BatchNorm2d(c2), nn.ReLU(inplace=True),
            nn.MaxPool2d(2),
            nn.Conv2d(c2, c3, 3, padding=1), nn.BatchNorm2d(c3), nn.ReLU(inplace=True),
            nn.MaxPool2d(2),
        )
        feat = c3 * (image_size // 8) ** 2
        self.pitch_head = nn.Sequential(nn.Flatten(), nn.Linear(feat, 128),
                                        nn.ReLU(inplace=True), nn.Linear(128, n_pitch))
        self.roll_head = nn.Sequential(nn.Flatten(), nn.Linear(feat, 128),
                                       nn.ReLU(inplace=True), nn.Linear(128, n_roll))

    def forward(self, x: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        h = self.features(x)
        return self.pitch_head(h), self.roll_head(h)


class TinyViT(nn.Module):
    """Minimal patch-embedding transformer for the optional ViT backbone."""

    def __init__(self, n_pitch: int, n_roll: int, image_size: int = 64,
                 patch: int = 8, dim: int = 128, depth: int = 2, heads: int = 4):
        super().__init__()
        n_patches = (image_size // patch) ** 2
        self.embed = nn.Conv2d(1, dim, kernel_size=patch, stride=patch)
        self.pos = nn.Parameter(torch.zeros(1, n_patches, dim))
        layer = nn.TransformerEncoderLayer(d_model=dim, nhead=heads,
                                           dim_feedforward=dim * 2,
                                           batch_first=True, norm_first=True)
        self.encoder = nn.TransformerEncoder(layer, num_layers=depth)
        self.pitch_head = nn.Linear(dim, n_pitch)
        self.roll_head = nn.Linear(dim, n_roll)

    def forward(self, x: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        tokens = self.embed(x).flatten(2).transpose(1, 2) + self.pos
        pooled = self.encoder(tokens).mean(dim=1)
        return self.pitch_head(pooled), self.roll_head(pooled)


def build_pose_model(backbone: str, n_pitch: int, n_roll: int,
                     image_size: int = 64) -> nn.Module:
    if backbone == "cnn3":
        return PoseCNN(n_pitch, n_roll, image_size)
    if backbone == "vit":
        return TinyViT(n_pitch, n_roll, image_size)
    if backbone == "resnet18":
        from torchvision.models import resnet18

        class ResNetPose(nn.Module):
            def __init__(self):
                super().__init__()
                net = resnet18(weights=None)
                net.conv1 = nn.Conv2d(1, 64, 7, 2, 3, bias=False)
                net.fc = nn.Identity()
                self.body = net
                self.pitch_head = nn.Linear(512, n_pitch)
                self.roll_head = nn.Linear(512, n_roll)

            def forward(self, x):
                h = self.body(x)
                return self.pitch_head(h), self.roll_head(h)

        return ResNetPose()
    raise ValueError(f"unknown backbone {backbone!r}")
