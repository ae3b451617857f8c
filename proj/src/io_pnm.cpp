#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "tvc/io.hpp"

namespace tvc {

namespace {

// next token after whitespace and '#' comments
bool next_header_token(std::istream& in, std::string* tok) {
    tok->clear();
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
            continue;
        }
        if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
            if (!tok->empty()) {
                in.unget();
                return true;
            }
            continue;
        }
        tok->push_back(char(ch));
    }
    return !tok->empty();
}

int parse_header_int(std::istream& in) {
    std::string tok;
    require(next_header_token(in, &tok), Err::CorruptHeader, "truncated header");
    int value = 0;
    for (char c : tok) {
        require(c >= '0' && c <= '9', Err::CorruptHeader, "non-numeric header field");
        value = value * 10 + (c - '0');
        require(value <= 1 << 20, Err::CorruptHeader, "header value out of range");
    }
    return value;
}

}  // namespace

Image load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), Err::EmptyFile, "cannot open " + path);

    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    require(in.good() && m0 == 'P', Err::CorruptHeader, "not a PNM file");
    int channels;
    if (m1 == '5')
        channels = 1;
    else if (m1 == '6')
        channels = 3;
    else
        fail(Err::UnsupportedFormat, std::string("unsupported PNM variant P") + m1);

    const int width = parse_header_int(in);
    const int height = parse_header_int(in);
    const int maxval = parse_header_int(in);
    require(width >= 1 && height >= 1, Err::CorruptHeader, "bad raster dimensions");
    require(maxval == 255, Err::UnsupportedFormat, "only maxval 255 is supported");
    in.get();  // single whitespace byte before the raster

    const size_t need = size_t(width) * height * channels;
    std::vector<unsigned char> raw(need);
    in.read(reinterpret_cast<char*>(raw.data()), std::streamsize(need));
    require(size_t(in.gcount()) == need, Err::CorruptHeader, "truncated raster payload");

    Image img(height, width, channels);
    for (size_t i = 0; i < need; ++i) img.pixels[i] = double(raw[i]) / 255.0;
    return img;
}

void save_image(const Image& img, const std::string& path) {
    require(img.channels == 1 || img.channels == 3, Err::UnsupportedFormat,
            "only 1- or 3-channel rasters are supported");
    require(img.height >= 1 && img.width >= 1, Err::GeometryMismatch, "empty image");

    std::string bytes;
    bytes += img.channels == 1 ? "P5" : "P6";
    bytes += "\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    for (double v : img.pixels) {
        int b = int(std::lround(v * 255.0));
        if (b < 0) b = 0;
        if (b > 255) b = 255;
        bytes.push_back(char(static_cast<unsigned char>(b)));
    }
    write_text_file(path, bytes);
}

void write_text_file(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(out.good(), Err::EmptyFile, "cannot write " + tmp);
        out.write(text.data(), std::streamsize(text.size()));
        require(out.good(), Err::EmptyFile, "short write to " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace tvc
