#include "honesty/public_suffix.hpp"

#include <catch_amalgamated.hpp>

using namespace honesty::trust;

TEST_CASE("rules, wildcards and exceptions") {
    auto psl = PublicSuffixList::parse(
        "// comment\ncom\nuk\nco.uk\n*.ck\n!www.ck\n\n// ===BEGIN PRIVATE DOMAINS===\n");
    CHECK(psl.public_suffix("a.b.com") == "com");
    CHECK(psl.registrable_domain("a.b.com") == "b.com");
    CHECK(psl.registrable_domain("news.bbc.co.uk") == "bbc.co.uk");
    CHECK(psl.public_suffix("x.foo.ck") == "foo.ck");
    CHECK(psl.registrable_domain("x.foo.ck") == "x.foo.ck");
    CHECK(psl.public_suffix("www.ck") == "ck");
    CHECK(psl.registrable_domain("www.ck") == "www.ck");
    CHECK(psl.public_suffix("host.unlisted") == "unlisted");
    CHECK(psl.registrable_domain("co.uk") == "co.uk");
}

TEST_CASE("bundled list covers common suffixes") {
    const auto& psl = PublicSuffixList::bundled();
    CHECK(psl.size() > 1000);
    CHECK(psl.registrable_domain("edition.cnn.com") == "cnn.com");
    CHECK(psl.registrable_domain("www.abc.net.au") == "abc.net.au");
    CHECK(psl.registrable_domain("www.bbc.co.uk") == "bbc.co.uk");
}

TEST_CASE("host_to_ascii") {
    CHECK(host_to_ascii("Example.COM") == "example.com");
    CHECK(host_to_ascii("bücher.de") == "xn--bcher-kva.de");
}
