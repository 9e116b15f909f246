#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "relscott/linalg.hpp"

int main(int argc, char** argv)
{
    relscott::linalg::ensure_backend(argv);
    doctest::Context context(argc, argv);
    return context.run();
}
