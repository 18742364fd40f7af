"""Low-level numba kernels shared by the bit-level structures.

Bit layouts used here:

* packed fields and plain bitmaps are LSB-first: bit ``i`` lives in word
  ``i >> 6`` at bit position ``i & 63``;
* plain bitmaps carry one absolute rank counter per 512-bit superblock
  (``supers[k]`` = ones in bits ``[0, 512k)``), with one extra trailing entry.

All kernels take 0-based positions; the 1-based public API is handled by the
Python wrappers.
"""

import numpy as np
from llvmlite import ir
from numba import njit, types
from numba.extending import intrinsic

SUPER_BITS = 512
SUPER_WORDS = SUPER_BITS // 64

_U1 = np.uint64(1)
_U63 = np.uint64(63)
_ALL = np.uint64(0xFFFFFFFFFFFFFFFF)


@intrinsic
def popcount(typingctx, x):
    sig = types.uint64(types.uint64)

    def codegen(context, builder, signature, args):
        return builder.ctpop(args[0])

    return sig, codegen


@intrinsic
def trailing_zeros(typingctx, x):
    sig = types.uint64(types.uint64)

    def codegen(context, builder, signature, args):
        return builder.cttz(args[0], ir.Constant(ir.IntType(1), 0))

    return sig, codegen


@njit(cache=True, inline="always")
def low_mask(w):
    # w in [0, 64]
    if w >= 64:
        return _ALL
    return (_U1 << np.uint64(w)) - _U1


@njit(cache=True, inline="always")
def get_field(words, bitpos, width):
    """Read ``width`` (<= 64) bits starting at ``bitpos``; LSB-first layout."""
    if width == 0:
        return np.uint64(0)
    idx = bitpos >> 6
    sh = bitpos & 63
    v = words[idx] >> np.uint64(sh)
    if sh + width > 64:
        v |= words[idx + 1] << np.uint64(64 - sh)
    return v & low_mask(width)


@njit(cache=True)
def pack_fields(values, width):
    n = values.shape[0]
    nwords = (n * width + 63) >> 6
    out = np.zeros(max(nwords, 1), dtype=np.uint64)
    if width == 0:
        return out
    mask = low_mask(width)
    pos = 0
    for i in range(n):
        v = np.uint64(values[i]) & mask
        idx = pos >> 6
        sh = pos & 63
        out[idx] |= v << np.uint64(sh)
        if sh + width > 64:
            out[idx + 1] |= v >> np.uint64(64 - sh)
        pos += width
    return out


@njit(cache=True)
def unpack_fields(words, width, n):
    out = np.zeros(n, dtype=np.uint64)
    pos = 0
    for i in range(n):
        out[i] = get_field(words, pos, width)
        pos += width
    return out


@njit(cache=True)
def build_supers(words, nbits):
    nsup = nbits // SUPER_BITS + 2
    sup = np.zeros(nsup, dtype=np.int64)
    acc = 0
    nwords = words.shape[0]
    for k in range(nsup):
        sup[k] = acc
        for w in range(k * SUPER_WORDS, min((k + 1) * SUPER_WORDS, nwords)):
            acc += popcount(words[w])
    return sup


@njit(cache=True, inline="always")
def rank1(words, supers, i):
    """Ones in bits ``[0, i)``."""
    sb = i >> 9
    r = supers[sb]
    end = i >> 6
    for w in range(sb * SUPER_WORDS, end):
        r += popcount(words[w])
    rem = i & 63
    if rem:
        r += popcount(words[end] & low_mask(rem))
    return r


@njit(cache=True, inline="always")
def access_bit(words, i):
    return (words[i >> 6] >> np.uint64(i & 63)) & _U1


@njit(cache=True)
def select_in_word(word, k):
    # position of the k-th (1-based) set bit of word
    for _ in range(k - 1):
        word &= word - _U1
    return trailing_zeros(word)


@njit(cache=True)
def select1(words, supers, nsup_used, j):
    """Position (0-based) of the j-th one, j >= 1."""
    lo = 0
    hi = nsup_used - 1
    # last superblock with supers[sb] < j
    while lo < hi:
        mid = (lo + hi + 1) >> 1
        if supers[mid] < j:
            lo = mid
        else:
            hi = mid - 1
    r = supers[lo]
    w = lo * SUPER_WORDS
    while True:
        c = popcount(words[w])
        if r + c >= j:
            return w * 64 + select_in_word(words[w], j - r)
        r += c
        w += 1


@njit(cache=True)
def select0(words, supers, nsup_used, j):
    lo = 0
    hi = nsup_used - 1
    while lo < hi:
        mid = (lo + hi + 1) >> 1
        if mid * SUPER_BITS - supers[mid] < j:
            lo = mid
        else:
            hi = mid - 1
    r = lo * SUPER_BITS - supers[lo]
    w = lo * SUPER_WORDS
    while True:
        inv = ~words[w]
        c = popcount(inv)
        if r + c >= j:
            return w * 64 + select_in_word(inv, j - r)
        r += c
        w += 1


# ---------------------------------------------------------------------------
# DAC access. A DAC is flattened into
#   (payload, pstart, widths, cwords, cwstart, csup, csstart)
# where layer l's chunks start at bit pstart[l] of payload, its continuation
# bitmap starts at word cwstart[l] of cwords, and its superblock counters
# (relative to the layer) start at csstart[l] of csup.
# ---------------------------------------------------------------------------


@njit(cache=True)
def dac_access(dac, i):
    payload, pstart, widths, cwords, cwstart, csup, csstart = dac
    res = np.uint64(0)
    shift = 0
    l = 0
    nl = widths.shape[0]
    while True:
        w = widths[l]
        res |= get_field(payload, pstart[l] + i * w, w) << np.uint64(shift)
        shift += w
        if l + 1 >= nl:
            return np.int64(res)
        ww = cwstart[l]
        if ((cwords[ww + (i >> 6)] >> np.uint64(i & 63)) & _U1) == 0:
            return np.int64(res)
        i = rank1(cwords[ww:cwstart[l + 1]], csup[csstart[l]:csstart[l + 1]], i)
        l += 1


@njit(cache=True)
def pack_var_fields(values, starts):
    """Pack ``values[k]`` into bits ``[starts[k], starts[k+1])``."""
    nwords = (starts[-1] + 63) >> 6
    out = np.zeros(max(nwords, 1), dtype=np.uint64)
    for k in range(values.shape[0]):
        width = starts[k + 1] - starts[k]
        if width == 0:
            continue
        v = values[k] & low_mask(width)
        pos = starts[k]
        idx = pos >> 6
        sh = pos & 63
        out[idx] |= v << np.uint64(sh)
        if sh + width > 64:
            out[idx + 1] |= v >> np.uint64(64 - sh)
    return out


@intrinsic
def leading_zeros(typingctx, x):
    sig = types.uint64(types.uint64)

    def codegen(context, builder, signature, args):
        return builder.ctlz(args[0], ir.Constant(ir.IntType(1), 0))

    return sig, codegen


# ---------------------------------------------------------------------------
# batch loops over plain bitmaps
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def plain_rank1_many(words, supers, idx):
    out = np.empty(idx.shape[0], dtype=np.int64)
    for q in range(idx.shape[0]):
        out[q] = rank1(words, supers, idx[q])
    return out


@njit(cache=True, nogil=True)
def plain_access_many(words, idx):
    out = np.empty(idx.shape[0], dtype=np.int64)
    for q in range(idx.shape[0]):
        out[q] = np.int64(access_bit(words, idx[q]))
    return out


@njit(cache=True, nogil=True)
def plain_select_many(words, supers, nsup_used, bits, js):
    out = np.empty(js.shape[0], dtype=np.int64)
    for q in range(js.shape[0]):
        if bits[q]:
            out[q] = select1(words, supers, nsup_used, js[q])
        else:
            out[q] = select0(words, supers, nsup_used, js[q])
    return out


# ---------------------------------------------------------------------------
# RRR: 15-bit blocks stored as (class, offset); ``dec`` lists the values of
# each class in increasing order starting at ``cstart[class]``.
# rrr = (classes, owords, sb_rank, sb_ptr, sample, widths, dec, cstart, nblocks)
# ---------------------------------------------------------------------------

RRR_T = 15


@njit(cache=True, inline="always")
def rrr_seek(rrr, blk):
    classes, sb_rank, sb_ptr, sample, widths = rrr[0], rrr[2], rrr[3], rrr[4], rrr[5]
    sb = blk // sample
    r = sb_rank[sb]
    ptr = sb_ptr[sb]
    for b in range(sb * sample, blk):
        c = classes[b]
        r += c
        ptr += widths[c]
    return r, ptr


@njit(cache=True, inline="always")
def rrr_block(rrr, blk, ptr):
    c = rrr[0][blk]
    off = get_field(rrr[1], ptr, rrr[5][c])
    return np.uint64(rrr[6][rrr[7][c] + np.int64(off)])


@njit(cache=True, nogil=True)
def rrr_rank1_many(rrr, idx):
    out = np.empty(idx.shape[0], dtype=np.int64)
    for q in range(idx.shape[0]):
        i = idx[q]
        blk = i // RRR_T
        rem = i - blk * RRR_T
        r, ptr = rrr_seek(rrr, blk)
        if rem:
            r += popcount(rrr_block(rrr, blk, ptr) & low_mask(rem))
        out[q] = r
    return out


@njit(cache=True, nogil=True)
def rrr_access_many(rrr, idx):
    out = np.empty(idx.shape[0], dtype=np.int64)
    for q in range(idx.shape[0]):
        i = idx[q]
        blk = i // RRR_T
        _, ptr = rrr_seek(rrr, blk)
        out[q] = np.int64((rrr_block(rrr, blk, ptr) >> np.uint64(i - blk * RRR_T)) & _U1)
    return out


@njit(cache=True, nogil=True)
def rrr_select_many(rrr, bits, js):
    classes, sb_rank, sb_ptr, sample, widths = rrr[0], rrr[2], rrr[3], rrr[4], rrr[5]
    nsb = sb_rank.shape[0]
    out = np.empty(js.shape[0], dtype=np.int64)
    full = low_mask(RRR_T)
    for q in range(js.shape[0]):
        j = js[q]
        b = bits[q]
        lo = 0
        hi = nsb - 1
        while lo < hi:
            mid = (lo + hi + 1) >> 1
            v = sb_rank[mid] if b else mid * sample * RRR_T - sb_rank[mid]
            if v < j:
                lo = mid
            else:
                hi = mid - 1
        r = sb_rank[lo] if b else lo * sample * RRR_T - sb_rank[lo]
        ptr = sb_ptr[lo]
        blk = lo * sample
        while True:
            c = np.int64(classes[blk])
            cc = c if b else RRR_T - c
            if r + cc >= j:
                break
            r += cc
            ptr += widths[c]
            blk += 1
        v = rrr_block(rrr, blk, ptr)
        if not b:
            v = ~v & full
        out[q] = blk * RRR_T + np.int64(select_in_word(v, j - r))
    return out


# ---------------------------------------------------------------------------
# DELTA: delta-coded gaps in an MSB-first word stream.
# dlt = (stream, spos, soff, szero, sample, ones)
# ---------------------------------------------------------------------------


@njit(cache=True, inline="always")
def msb_read(words, pos, width):
    if width == 0:
        return np.uint64(0)
    idx = pos >> 6
    off = pos & 63
    v = words[idx] << np.uint64(off)
    if off and off + width > 64:
        v |= words[idx + 1] >> np.uint64(64 - off)
    return v >> np.uint64(64 - width)


@njit(cache=True, inline="always")
def msb_zeros(words, pos):
    z = 0
    while True:
        idx = pos >> 6
        off = pos & 63
        v = words[idx] << np.uint64(off)
        if v != 0:
            return z + np.int64(leading_zeros(v))
        z += 64 - off
        pos += 64 - off


@njit(cache=True, inline="always")
def delta_decode(words, pos):
    z = msb_zeros(words, pos)
    pos += z
    nb = np.int64(msb_read(words, pos, z + 1))
    pos += z + 1
    x = (_U1 << np.uint64(nb - 1)) | msb_read(words, pos, nb - 1)
    return np.int64(x), pos + nb - 1


@njit(cache=True)
def _msb_append(words, length, value, width):
    while width:
        off = length & 63
        take = min(64 - off, width)
        chunk = (value >> np.uint64(width - take)) & low_mask(take)
        words[length >> 6] |= chunk << np.uint64(64 - off - take)
        width -= take
        length += take
    return length


@njit(cache=True)
def delta_encode(positions, sample):
    """Delta-code the gaps of strictly increasing ``positions`` (first gap p+1)."""
    m = positions.shape[0]
    # 64-bit value costs at most 2*7+1+63 bits
    words = np.zeros(max(1, (m * 80 + 63) >> 6), dtype=np.uint64)
    ns = max(1, (m + sample - 1) // sample)
    spos = np.empty(ns, dtype=np.int64)
    soff = np.empty(ns, dtype=np.int64)
    szero = np.empty(ns, dtype=np.int64)
    spos[0] = -1
    soff[0] = 0
    szero[0] = 0
    length = 0
    prev = -1
    for k in range(m):
        if k % sample == 0:
            s = k // sample
            spos[s] = prev
            soff[s] = length
            szero[s] = prev - (k - 1)
        x = np.uint64(positions[k] - prev)
        nb = 64 - np.int64(leading_zeros(x))
        lnb = 64 - np.int64(leading_zeros(np.uint64(nb)))
        length = _msb_append(words, length, np.uint64(1), lnb)  # lnb-1 zeros, then 1
        length = _msb_append(words, length, np.uint64(nb), lnb - 1)
        length = _msb_append(words, length, x, nb - 1)
        prev = positions[k]
    nw = max(1, (length + 63) >> 6)
    return words[:nw].copy(), length, spos, soff, szero


@njit(cache=True)
def _bsearch_last_below(arr, v):
    # last index with arr[idx] < v (arr[0] < v assumed)
    lo = 0
    hi = arr.shape[0] - 1
    while lo < hi:
        mid = (lo + hi + 1) >> 1
        if arr[mid] < v:
            lo = mid
        else:
            hi = mid - 1
    return lo


@njit(cache=True, nogil=True)
def delta_rank1_many(dlt, idx):
    stream, spos, soff, sample, ones = dlt[0], dlt[1], dlt[2], dlt[4], dlt[5]
    out = np.empty(idx.shape[0], dtype=np.int64)
    for q in range(idx.shape[0]):
        i = idx[q]
        m = _bsearch_last_below(spos, i)
        count = m * sample
        pos = spos[m]
        off = soff[m]
        while count < ones:
            g, off = delta_decode(stream, off)
            if pos + g >= i:
                break
            pos += g
            count += 1
        out[q] = count
    return out


@njit(cache=True, nogil=True)
def delta_select_many(dlt, bits, js):
    stream, spos, soff, szero, sample, ones = dlt
    out = np.empty(js.shape[0], dtype=np.int64)
    for q in range(js.shape[0]):
        j = js[q]
        if bits[q]:
            m = (j - 1) // sample
            pos = spos[m]
            off = soff[m]
            for _ in range(j - m * sample):
                g, off = delta_decode(stream, off)
                pos += g
            out[q] = pos
        else:
            m = _bsearch_last_below(szero, j)
            t = m * sample
            pos = spos[m]
            off = soff[m]
            while t < ones:
                g, off = delta_decode(stream, off)
                if (pos + g) - t >= j:
                    break
                pos += g
                t += 1
            out[q] = j - 1 + t
    return out
