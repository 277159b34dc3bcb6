#!/usr/bin/env python3
"""Generates the shipped unstructured sample mesh (deterministic jitter of a
structured 16x16 triangulation; boundary vertices stay on the unit square)."""

N = 16
AMP = 0.22 / N


def lcg(state):
    while True:
        state = (6364136223846793005 * state + 1442695040888963407) % 2**64
        yield (state >> 11) / 2**53


def main():
    rand = lcg(20240817)
    verts = []
    for j in range(N + 1):
        for i in range(N + 1):
            x, y = i / N, j / N
            if 0 < i < N and 0 < j < N:
                x += AMP * (2 * next(rand) - 1)
                y += AMP * (2 * next(rand) - 1)
            verts.append((x, y))

    tris = []
    vid = lambda i, j: j * (N + 1) + i
    for j in range(N):
        for i in range(N):
            ll, lr = vid(i, j), vid(i + 1, j)
            ur, ul = vid(i + 1, j + 1), vid(i, j + 1)
            tris.append((ll, lr, ur))
            tris.append((ll, ur, ul))

    for a, b, c in tris:
        (xa, ya), (xb, yb), (xc, yc) = verts[a], verts[b], verts[c]
        area = 0.5 * ((xb - xa) * (yc - ya) - (yb - ya) * (xc - xa))
        assert area > 1e-5, f"degenerate triangle {a},{b},{c}: area {area}"

    with open("unstructured_16.msh", "w") as out:
        out.write("# unstructured sample mesh: jittered 16x16 triangulation\n")
        out.write(f"{len(verts)} {len(tris)}\n")
        for x, y in verts:
            out.write(f"{x:.16g} {y:.16g}\n")
        for a, b, c in tris:
            out.write(f"{a} {b} {c}\n")
    print(f"wrote unstructured_16.msh ({len(verts)} vertices, {len(tris)} triangles)")


if __name__ == "__main__":
    main()
