#!/usr/bin/env python3
# Copyright 2026 The Capivara Authors
# SPDX-License-Identifier: Apache-2.0
"""Generates the bundled event timeline used by the simulator tests.

Writes one JSON object per line with keys ts, action, path, text, author,
sorted keys and no spaces, in the same schema the git exporter emits.

    python3 make_events.py events.jsonl            # 500 events over ~1000 blocks
    python3 make_events.py burst.jsonl --burst 250 # simultaneous submissions
"""

import argparse
import json
import random

START_TS = 1230768000  # 2009-01-01T00:00:00Z
INTERVAL = 1200

NAMES = [
    "openssh", "openssl", "bash", "coreutils", "glibc", "linux", "systemd", "pacman", "vim", "nano",
    "curl", "wget", "git", "gcc", "make", "cmake", "zlib", "xz", "bzip2", "tar",
    "python", "python-requests", "python-numpy", "python-six", "python-yaml", "pypy3", "python-pip",
    "cython", "pyqt5", "python-lxml", "perl", "perl-json", "perl-dbi", "perl-uri", "perl-libwww",
    "perl-xml-parser", "ruby", "ruby-rake", "rbenv", "ruby-rbs", "ruby-bundler", "rubygems-rbx",
    "fal", "falkon", "faltergeist", "debianutils", "debian-archive-keyring", "gentoo-functions",
    "fedora-packager", "ubuntu-keyring", "manjaro-tools", "slackpkg", "kubuntu-settings", "mandriva-theme",
    "knoppix-tools", "elive-skel", "crux-ports", "centos-logos", "yoper-base", "turkix-tools",
    "ffmpeg", "gstreamer", "pulseaudio", "alsa-lib", "mesa", "xorg-server", "firefox", "thunderbird",
    "libreoffice", "gimp", "inkscape", "blender", "qt5-base", "gtk3", "glib2", "dbus", "nginx",
    "apache", "postgresql", "sqlite", "redis", "lua", "go", "rust", "nodejs", "jdk-openjdk",
    "sudo", "shadow", "util-linux", "e2fsprogs", "grub", "iproute2", "iptables", "dhcpcd", "wpa_supplicant",
]

LICENSES = ["GPL", "LGPL", "MIT", "BSD", "Apache", "custom"]


def recipe(rng, name, version, rel):
    nsrc = rng.randint(1, 3)
    sources = ['"https://example.org/src/${pkgname}-${pkgver}.tar.gz"']
    sources += ["'%s-%d.patch'" % (name, i) for i in range(1, nsrc)]
    sums = ["'%064x'" % rng.getrandbits(256) for _ in sources]
    deps = " ".join("'%s'" % d for d in rng.sample(NAMES[:20], rng.randint(0, 3)))
    lines = [
        "# Maintainer: Fixture <fixture@example.org>",
        "pkgname=%s" % name,
        "pkgver=%s" % version,
        "pkgrel=%d" % rel,
        "pkgdesc='Fixture package %s'" % name,
        "arch=('x86_64')",
        "url='https://example.org/%s'" % name,
        "license=('%s')" % rng.choice(LICENSES),
        "depends=(%s)" % deps,
        "source=(%s)" % "\n        ".join(sources),
        "sha256sums=(%s)" % "\n            ".join(sums),
        "",
        "build() {",
        '  cd "$srcdir/$pkgname-$pkgver"',
        "  make",
        "}",
        "",
    ]
    return "\n".join(lines)


def bump(rng, version):
    parts = [int(p) for p in version.split(".")]
    i = rng.randrange(len(parts))
    parts[i] += 1
    for j in range(i + 1, len(parts)):
        parts[j] = 0
    return ".".join(str(p) for p in parts)


def record(ts, action, name, text, author):
    return json.dumps(
        {"action": action, "author": author, "path": "%s/trunk/PKGBUILD" % name, "text": text, "ts": ts},
        sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def timeline(rng, count, span_blocks):
    # Spread count timestamps over span_blocks intervals, first and last pinned.
    offsets = sorted(rng.randrange(1, span_blocks * INTERVAL) for _ in range(count - 2))
    return [START_TS] + [START_TS + o for o in offsets] + [START_TS + span_blocks * INTERVAL]


def generate(seed, count, span_blocks, burst):
    rng = random.Random(seed)
    versions = {}
    authors = ["anthraxx", "foutrelis", "heftig", "felixonmars", "eschwartz", "svenstaro", "jelly", "dvzrv"]
    stamps = [START_TS] * count if burst else timeline(rng, count, span_blocks)
    out = []
    for i, ts in enumerate(stamps):
        if burst:
            name = "%s-burst%03d" % (NAMES[i % len(NAMES)], i)
        else:
            name = rng.choice(NAMES)
        if name in versions:
            version, rel = bump(rng, versions[name][0]), 1
            action = "update"
        else:
            version, rel = "%d.%d.%d" % (rng.randint(0, 9), rng.randint(0, 20), rng.randint(0, 9)), 1
            action = "add"
        versions[name] = (version, rel)
        out.append(record(ts, action, name, recipe(rng, name, version, rel), rng.choice(authors)))
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out")
    ap.add_argument("--seed", type=int, default=2009)
    ap.add_argument("--count", type=int, default=500)
    ap.add_argument("--span-blocks", type=int, default=1000)
    ap.add_argument("--burst", type=int, default=0, help="emit N events sharing one timestamp")
    args = ap.parse_args()
    count = args.burst or args.count
    with open(args.out, "w", encoding="utf-8", newline="\n") as f:
        for line in generate(args.seed, count, args.span_blocks, bool(args.burst)):
            f.write(line + "\n")


if __name__ == "__main__":
    main()
