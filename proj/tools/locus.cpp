#include <cstdio>

auto main() -> int
{
    std::puts("placeholder");
    return 0;
}
