"""Regenerate the shipped preset network files under src/lwir/presets/.

The JSON files are the artifact; this script only saves typing.  Baselines:

* GLCIC completion network: 5x5 conv, two stride-2 convs, 3x3 convs, four
  dilated convs (2, 4, 8, 16), two 4x4 stride-2 deconvs, RGB+mask input.
* DnCNN-S: 17 3x3 layers of width 64 on grayscale input (predicts the residual).
* SRResNet (SRGAN generator): 9x9 head, 16 residual blocks, two x2 sub-pixel
  stages, 1x1 output conv.

Variants M1..M6 swap the 3x3, upsampling and dilated layers following the
variant table; every M6 network uses LIST (k=4, n_b=2), bilinear+LIST
upsampling and GSAT (g=8).

The inpainting and super-resolution tables count a multiply-accumulate as
two FLOPs, so those presets declare ``flops_per_mac: 2``.
"""
from __future__ import annotations

import json
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "lwir" / "presets"


class Builder:
    def __init__(self):
        self.nodes = []
        self.last = "input"

    def add(self, node_id, op, inputs=None, **params):
        self.nodes.append({"id": node_id, "op": op, "in": inputs or [self.last], **params})
        self.last = node_id
        return node_id


def network(name, channels, nodes, output, flops_per_mac=1):
    doc = {
        "name": name,
        "input": {"channels": channels, "height": None, "width": None},
        "nodes": nodes,
        "output": output,
    }
    if flops_per_mac != 1:
        doc["flops_per_mac"] = flops_per_mac
    return doc


def glcic(name, three="conv", up="deconv", dil="normal"):
    b = Builder()

    def conv3(node_id, n):
        if three == "conv":
            b.add(node_id, "conv2d", out_channels=n, kernel=3, bn=True, relu=True)
        elif three == "ds":
            b.add(node_id, "depthwise_separable", out_channels=n, kernel=3, bn=True, relu=True)
        else:
            b.add(node_id, "list", out_channels=n, k=4, n_b=2)

    def down(node_id, n):
        if three == "conv":
            b.add(node_id, "conv2d", out_channels=n, kernel=3, stride=2, bn=True, relu=True)
        elif three == "ds":
            b.add(node_id, "depthwise_separable", out_channels=n, kernel=3, stride=2, bn=True, relu=True)
        else:
            b.add(node_id, "downsample", out_channels=n, factor=2, k=4, n_b=2)

    def dilated(node_id, d):
        if dil == "normal":
            b.add(node_id, "conv2d", out_channels=256, kernel=3, dilation=d, bn=True, relu=True)
        else:
            b.add(node_id, "gsat", groups=8, dilation=d)

    def upsample(node_id, n):
        if up == "deconv":
            b.add(node_id, "transposed_conv", out_channels=n, kernel=4, stride=2, padding=1, bn=True, relu=True)
        elif up in ("subpixel_normal", "subpixel_separable"):
            # 2x2 sub-pixel kernels carry the same weights as a 4x4 stride-2 deconv
            b.add(node_id, "upsample", mode=up, scale=2, out_channels=n, kernel=2, bn=True, relu=True)
        elif up == "bil_ds":
            b.add(node_id + "_resize", "bilinear_resize", scale=2)
            b.add(node_id, "depthwise_separable", out_channels=n, kernel=3, bn=True, relu=True)
        else:
            b.add(node_id, "upsample", mode="bilinear_list", scale=2, out_channels=n, k=4, n_b=2)

    b.add("conv1", "conv2d", out_channels=64, kernel=5, bn=True, relu=True)
    down("conv2", 128)
    conv3("conv3", 128)
    down("conv4", 256)
    conv3("conv5", 256)
    conv3("conv6", 256)
    for i, d in enumerate((2, 4, 8, 16), start=1):
        dilated(f"dil{i}", d)
    conv3("conv7", 256)
    conv3("conv8", 256)
    upsample("up1", 128)
    conv3("conv9", 128)
    upsample("up2", 64)
    conv3("conv10", 32)
    b.add("out", "conv2d", out_channels=3, kernel=3)
    return network(name, 4, b.nodes, "out", flops_per_mac=2)


GLCIC_VARIANTS = {
    "glcic_baseline": dict(three="conv", up="deconv", dil="normal"),
    "glcic_m1": dict(three="ds", up="subpixel_normal", dil="normal"),
    "glcic_m2": dict(three="ds", up="subpixel_separable", dil="normal"),
    "glcic_m3": dict(three="ds", up="bil_ds", dil="normal"),
    "glcic_m4": dict(three="list", up="bil_ds", dil="normal"),
    "glcic_m5": dict(three="list", up="bil_list", dil="normal"),
    "glcic_m6": dict(three="list", up="bil_list", dil="gsat"),
}


def dncnn(name, light=False, depth=17, width=64, channels=1):
    b = Builder()
    b.add("conv1", "conv2d", out_channels=width, kernel=3, relu=True)
    for i in range(2, depth):
        if light:
            b.add(f"conv{i}", "list", out_channels=width, k=4, n_b=2)
        else:
            b.add(f"conv{i}", "conv2d", out_channels=width, kernel=3, bn=True, relu=True)
    b.add(f"conv{depth}", "conv2d", out_channels=channels, kernel=3)
    return network(name, channels, b.nodes, f"conv{depth}")


def srresnet(name, light=False, blocks=16, width=64):
    b = Builder()

    def conv3(node_id, relu):
        if light:
            return b.add(node_id, "list", out_channels=width, k=4, n_b=2)
        return b.add(node_id, "conv2d", out_channels=width, kernel=3, bn=True, relu=relu)

    head = b.add("head", "conv2d", out_channels=width, kernel=9, relu=True)
    for i in range(1, blocks + 1):
        skip = b.last
        conv3(f"rb{i}a", True)
        conv3(f"rb{i}b", False)
        b.add(f"rb{i}", "add", [skip, b.last])
    conv3("trunk", False)
    b.add("skip", "add", [head, "trunk"])
    for i in (1, 2):
        if light:
            b.add(f"up{i}", "upsample", mode="bilinear_list", scale=2, out_channels=width, k=4, n_b=2)
        else:
            b.add(f"up{i}", "upsample", mode="subpixel_normal", scale=2, out_channels=width, kernel=3, relu=True)
    b.add("out", "conv2d", out_channels=3, kernel=1)
    return network(name, 3, b.nodes, "out", flops_per_mac=2)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    docs = [glcic(name, **kw) for name, kw in GLCIC_VARIANTS.items()]
    docs += [dncnn("dncnn_baseline"), dncnn("dncnn_m6", light=True)]
    docs += [srresnet("srresnet_baseline"), srresnet("srresnet_m6", light=True)]
    for doc in docs:
        path = OUT / f"{doc['name']}.json"
        path.write_text(json.dumps(doc, indent=1) + "\n")
        print(f"wrote {path.relative_to(OUT.parents[2])}")


if __name__ == "__main__":
    main()
